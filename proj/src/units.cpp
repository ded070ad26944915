#include "gemlab/units.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>

#include "gemlab/constants.hpp"

namespace gem::units {

namespace {

struct UnitDef {
    Kind kind;
    double scale;  // multiplier taking the literal number to canonical units
};

const std::map<std::string, UnitDef>& unit_table() {
    static const std::map<std::string, UnitDef> table = {
        {"s", {Kind::time_s, 1.0}},
        {"ms", {Kind::time_s, 1e-3}},
        {"us", {Kind::time_s, 1e-6}},
        {"ns", {Kind::time_s, 1e-9}},
        // Frequencies are given as cycles and stored angular: the lab quotes
        // "Gamma = 5.75 MHz" for Gamma/2pi.
        {"Hz", {Kind::frequency, two_pi}},
        {"kHz", {Kind::frequency, two_pi * 1e3}},
        {"MHz", {Kind::frequency, two_pi * 1e6}},
        {"GHz", {Kind::frequency, two_pi * 1e9}},
        {"rad/s", {Kind::frequency, 1.0}},
        {"m", {Kind::length_m, 1.0}},
        {"cm", {Kind::length_m, 1e-2}},
        {"mm", {Kind::length_m, 1e-3}},
        {"um", {Kind::length_m, 1e-6}},
        {"nm", {Kind::length_m, 1e-9}},
        {"K", {Kind::temperature_k, 1.0}},
        {"mK", {Kind::temperature_k, 1e-3}},
        {"uK", {Kind::temperature_k, 1e-6}},
        {"nK", {Kind::temperature_k, 1e-9}},
        {"rad", {Kind::angle_rad, 1.0}},
        {"mrad", {Kind::angle_rad, 1e-3}},
        {"deg", {Kind::angle_rad, pi / 180.0}},
        {"Hz/m", {Kind::gradient, two_pi}},
        {"kHz/m", {Kind::gradient, two_pi * 1e3}},
        {"MHz/m", {Kind::gradient, two_pi * 1e6}},
        {"kHz/cm", {Kind::gradient, two_pi * 1e5}},
        {"dB/km", {Kind::attenuation_db_per_km, 1.0}},
    };
    return table;
}

}  // namespace

std::optional<Quantity> parse(const std::string& text, Kind expected) {
    const char* p = text.c_str();
    char* end = nullptr;
    double v = std::strtod(p, &end);
    if (end == p || !std::isfinite(v)) return std::nullopt;

    while (*end != '\0' && std::isspace(static_cast<unsigned char>(*end))) ++end;
    std::string unit(end);
    while (!unit.empty() && std::isspace(static_cast<unsigned char>(unit.back()))) unit.pop_back();

    if (unit.empty()) {
        if (expected != Kind::dimensionless) return std::nullopt;
        return Quantity{v, Kind::dimensionless};
    }
    auto it = unit_table().find(unit);
    if (it == unit_table().end()) return std::nullopt;
    if (it->second.kind != expected) return std::nullopt;
    return Quantity{v * it->second.scale, expected};
}

const char* kind_name(Kind k) {
    switch (k) {
        case Kind::dimensionless: return "dimensionless";
        case Kind::time_s: return "time (s, ms, us, ns)";
        case Kind::frequency: return "frequency (Hz, kHz, MHz, GHz)";
        case Kind::length_m: return "length (m, cm, mm, um, nm)";
        case Kind::temperature_k: return "temperature (K, mK, uK)";
        case Kind::angle_rad: return "angle (rad, mrad, deg)";
        case Kind::gradient: return "gradient (Hz/m, kHz/m, kHz/cm)";
        case Kind::attenuation_db_per_km: return "attenuation (dB/km)";
    }
    return "unknown";
}

}  // namespace gem::units
