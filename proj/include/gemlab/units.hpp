#pragma once

#include <optional>
#include <string>

namespace gem::units {

enum class Kind {
    dimensionless,
    time_s,          // s, ms, us, ns
    frequency,       // Hz..GHz, stored as angular rad/s (experiment-speak: "5.75 MHz" means omega/2pi)
    length_m,        // m, cm, mm, um, nm
    temperature_k,   // K, mK, uK, nK
    angle_rad,       // rad, deg, mrad
    gradient,        // Hz/m style, stored as rad/s/m
    attenuation_db_per_km,
};

struct Quantity {
    double value = 0.0;  // in canonical units for its kind
    Kind kind = Kind::dimensionless;
};

// Parses "6.66 us", "325 MHz", "0.5 deg", "488". Numbers without a unit are
// accepted only for Kind::dimensionless; everything physical must carry one.
std::optional<Quantity> parse(const std::string& text, Kind expected);

const char* kind_name(Kind k);

}  // namespace gem::units
