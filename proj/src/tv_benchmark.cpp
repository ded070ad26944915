#include "gemlab/tv_benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "gemlab/csv.hpp"
#include "gemlab/decay_models.hpp"
#include "gemlab/rng.hpp"

namespace gem {

namespace {

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

struct RotatedStats {
    double mean_norm = 0.0;  // |mean vector|
    double var_w_amp = 0.0;  // Wigner-domain variance along the mean (vacuum = 1)
    double var_w_phase = 0.0;
};

RotatedStats rotated_stats(const std::vector<double>& x, const std::vector<double>& p,
                           const std::vector<std::size_t>* index) {
    const std::size_t m = index ? index->size() : x.size();
    double mx = 0.0, mp = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t k = index ? (*index)[i] : i;
        mx += x[k];
        mp += p[k];
    }
    mx /= static_cast<double>(m);
    mp /= static_cast<double>(m);

    const double norm = std::hypot(mx, mp);
    // amplitude quadrature axis; falls back to x if the mean vanishes
    const double cx = norm > 0.0 ? mx / norm : 1.0;
    const double cp = norm > 0.0 ? mp / norm : 0.0;

    double s_amp = 0.0, s_phase = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t k = index ? (*index)[i] : i;
        const double dx = x[k] - mx;
        const double dp = p[k] - mp;
        const double a = dx * cx + dp * cp;
        const double b = -dx * cp + dp * cx;
        s_amp += a * a;
        s_phase += b * b;
    }
    const double denom = static_cast<double>(m) - 1.0;

    RotatedStats out;
    out.mean_norm = norm;
    out.var_w_amp = 2.0 * s_amp / denom - 1.0;
    out.var_w_phase = 2.0 * s_phase / denom - 1.0;
    return out;
}

std::pair<double, double> tv_values(const RotatedStats& in, const RotatedStats& out) {
    if (in.var_w_amp < -0.2 || in.var_w_phase < -0.2 || out.var_w_amp < -0.2 ||
        out.var_w_phase < -0.2)
        throw std::invalid_argument("tv_from_ensembles: unphysical variances (below vacuum)");

    const double g2 = (out.mean_norm * out.mean_norm) / (in.mean_norm * in.mean_norm);
    const double t_amp = g2 * in.var_w_amp / out.var_w_amp;
    const double t_phase = g2 * in.var_w_phase / out.var_w_phase;
    const double v_amp = std::max(0.0, out.var_w_amp - g2 * in.var_w_amp);
    const double v_phase = std::max(0.0, out.var_w_phase - g2 * in.var_w_phase);
    return {t_amp + t_phase, std::sqrt(v_amp * v_phase)};
}

}  // namespace

TVPoint tv_from_ensembles(const QuadratureEnsemble& input, const QuadratureEnsemble& output,
                          const TVOptions& options) {
    input.validate();
    output.validate();
    if (input.size() < 100 || output.size() < 100)
        throw std::invalid_argument("tv_from_ensembles: need at least 100 samples per ensemble");

    const RotatedStats in_stats = rotated_stats(input.x, input.p, nullptr);
    const RotatedStats out_stats = rotated_stats(output.x, output.p, nullptr);

    // T needs a signal: require the input displacement to stand clear of its
    // own standard error.
    const double sem = std::sqrt(1.0 / static_cast<double>(input.size()));
    if (in_stats.mean_norm < 5.0 * sem)
        throw std::invalid_argument("tv_from_ensembles: input displacement is zero or lost in "
                                    "noise, T is undefined");

    TVPoint point;
    std::tie(point.t, point.v) = tv_values(in_stats, out_stats);

    if (options.bootstrap_resamples > 0) {
        auto rng = make_rng(options.seed, "tv-bootstrap");
        std::uniform_int_distribution<std::size_t> pick_in(0, input.size() - 1);
        std::uniform_int_distribution<std::size_t> pick_out(0, output.size() - 1);
        std::vector<std::size_t> idx_in(input.size()), idx_out(output.size());
        double sum_t = 0.0, sum_t2 = 0.0, sum_v = 0.0, sum_v2 = 0.0;
        int kept = 0;
        for (int r = 0; r < options.bootstrap_resamples; ++r) {
            for (std::size_t& i : idx_in) i = pick_in(rng);
            for (std::size_t& i : idx_out) i = pick_out(rng);
            const RotatedStats bi = rotated_stats(input.x, input.p, &idx_in);
            const RotatedStats bo = rotated_stats(output.x, output.p, &idx_out);
            try {
                const auto [t, v] = tv_values(bi, bo);
                sum_t += t;
                sum_t2 += t * t;
                sum_v += v;
                sum_v2 += v * v;
                ++kept;
            } catch (const std::invalid_argument&) {
                // a pathological resample; skip it
            }
        }
        if (kept > 1) {
            const double n = static_cast<double>(kept);
            point.err_t = std::sqrt(std::max(0.0, sum_t2 / n - (sum_t / n) * (sum_t / n)));
            point.err_v = std::sqrt(std::max(0.0, sum_v2 / n - (sum_v / n) * (sum_v / n)));
        }
    }
    return point;
}

double DetectionBudget::total_eta() const {
    return spatial_filter_transmission * fringe_visibility_squared * heterodyne_penalty *
           detector_qe * shotnoise_to_darknoise_factor;
}

void DetectionBudget::validate() const {
    for (double c : {spatial_filter_transmission, fringe_visibility_squared, heterodyne_penalty,
                     detector_qe, shotnoise_to_darknoise_factor}) {
        if (!(c > 0.0) || c > 1.0)
            throw std::invalid_argument("detection budget: components must be in (0, 1]");
    }
}

TVPoint correct_detection(const TVPoint& raw, const DetectionBudget& budget) {
    budget.validate();
    const double eta = budget.total_eta();
    TVPoint out;
    out.t = raw.t / eta;
    out.v = (raw.v - (1.0 - eta)) / eta;
    out.err_t = raw.err_t / eta;
    out.err_v = raw.err_v / eta;
    if (out.v < -3.0 * std::max(out.err_v, 1e-12))
        throw std::invalid_argument("correct_detection: corrected V is negative beyond tolerance "
                                    "(unphysical raw point for this budget)");
    return out;
}

BoundaryCurves boundary_curves(int points_per_curve) {
    if (points_per_curve < 2) throw std::invalid_argument("boundary_curves: need >= 2 points");
    BoundaryCurves curves;
    curves.classical.reserve(static_cast<std::size_t>(points_per_curve));
    curves.linear_loss.reserve(static_cast<std::size_t>(points_per_curve));
    // classical curve: T -> 1 as g -> inf; sample gain so T covers (0, 1)
    const double g_max = 8.0;
    for (int i = 0; i < points_per_curve; ++i) {
        const double g = g_max * static_cast<double>(i) / static_cast<double>(points_per_curve - 1);
        TVPoint p;
        p.t = 2.0 * g * g / (2.0 * g * g + 1.0);
        p.v = 1.0 + g * g;
        curves.classical.push_back(p);
    }
    for (int i = 0; i < points_per_curve; ++i) {
        const double eta = static_cast<double>(i) / static_cast<double>(points_per_curve - 1);
        TVPoint p;
        p.t = 2.0 * eta;
        p.v = 1.0 - eta;
        curves.linear_loss.push_back(p);
    }
    return curves;
}

FiberReference fiber_reference(double time, double attenuation_db_per_km, double group_index) {
    if (time < 0.0) throw std::invalid_argument("fiber_reference: time must be >= 0");
    FiberReference ref;
    ref.distance_km = constants::speed_of_light / group_index * time / 1000.0;
    ref.transmission = std::pow(10.0, -attenuation_db_per_km * ref.distance_km / 10.0);
    ref.tv.t = 2.0 * ref.transmission;
    ref.tv.v = 1.0 - ref.transmission;
    return ref;
}

void MemoryRecord::validate() const {
    if (label.empty()) throw std::invalid_argument("memory record: empty label");
    if (!(max_efficiency >= 0.0) || max_efficiency > 1.0)
        throw std::invalid_argument("memory record '" + label + "': efficiency outside [0, 1]");
    for (std::size_t i = 0; i < decay_curve.size(); ++i) {
        if (!(decay_curve[i].second >= 0.0) || decay_curve[i].second > 1.0)
            throw std::invalid_argument("memory record '" + label +
                                        "': curve efficiency outside [0, 1]");
        if (i > 0 && !(decay_curve[i].first > decay_curve[i - 1].first))
            throw std::invalid_argument("memory record '" + label +
                                        "': curve times must be increasing");
    }
}

double MemoryRecord::efficiency_at(double t) const {
    if (decay_curve.empty()) return 0.0;
    if (t <= decay_curve.front().first) return decay_curve.front().second;
    if (t >= decay_curve.back().first) return 0.0;
    for (std::size_t i = 1; i < decay_curve.size(); ++i) {
        if (t <= decay_curve[i].first) {
            const auto& [t0, e0] = decay_curve[i - 1];
            const auto& [t1, e1] = decay_curve[i];
            const double f = (t - t0) / (t1 - t0);
            return e0 + f * (e1 - e0);
        }
    }
    return 0.0;
}

namespace {

MemoryPlatform parse_platform(const std::string& s) {
    if (s == "cold_atoms") return MemoryPlatform::cold_atoms;
    if (s == "warm_vapour") return MemoryPlatform::warm_vapour;
    if (s == "solid_state") return MemoryPlatform::solid_state;
    if (s == "other") return MemoryPlatform::other;
    throw std::invalid_argument("unknown platform '" + s + "'");
}

MemoryProtocol parse_protocol(const std::string& s) {
    if (s == "GEM") return MemoryProtocol::gem;
    if (s == "EIT") return MemoryProtocol::eit;
    if (s == "AFC") return MemoryProtocol::afc;
    if (s == "Raman") return MemoryProtocol::raman;
    if (s == "DLCZ") return MemoryProtocol::dlcz;
    if (s == "CRIB") return MemoryProtocol::crib;
    if (s == "ROSE") return MemoryProtocol::rose;
    if (s == "HYPER") return MemoryProtocol::hyper;
    if (s == "other") return MemoryProtocol::other;
    throw std::invalid_argument("unknown protocol '" + s + "'");
}

std::vector<std::pair<double, double>> thermal_model_curve(double e0, double tau_l, double tau_d) {
    std::vector<std::pair<double, double>> curve;
    const double t_max = 12.0 * tau_l;
    const int n = 600;
    for (int i = 0; i <= n; ++i) {
        const double t = t_max * static_cast<double>(i) / static_cast<double>(n);
        curve.emplace_back(t, thermal_decay_model(t, e0, tau_l, tau_d));
    }
    return curve;
}

std::vector<std::pair<double, double>> fiber_model_curve() {
    std::vector<std::pair<double, double>> curve;
    const double t_max = 1.5e-3;
    const int n = 600;
    for (int i = 0; i <= n; ++i) {
        const double t = t_max * static_cast<double>(i) / static_cast<double>(n);
        curve.emplace_back(t, fiber_reference(t).transmission);
    }
    return curve;
}

void fill_curve(MemoryRecord& record, const std::string& base_dir) {
    const std::string& ref = record.curve_ref;
    if (ref.empty()) return;
    if (ref.rfind("thermal:", 0) == 0) {
        std::istringstream body(ref.substr(8));
        double e0 = 0.0, tau_l = 0.0, tau_d = 0.0;
        char c1 = 0, c2 = 0;
        if (!(body >> e0 >> c1 >> tau_l >> c2 >> tau_d) || c1 != ',' || c2 != ',')
            throw std::invalid_argument("bad thermal model spec '" + ref + "'");
        record.decay_curve = thermal_model_curve(e0, tau_l, tau_d);
        return;
    }
    if (ref.rfind("fiber:", 0) == 0) {
        record.decay_curve = fiber_model_curve();
        return;
    }
    const std::string path = base_dir.empty() ? ref : base_dir + "/" + ref;
    const csv::Table table = csv::read_file(path);
    for (const auto& row : table.rows) {
        if (row.size() < 2) throw std::invalid_argument("curve file '" + path + "': short row");
        record.decay_curve.emplace_back(csv::to_double(row[0]), csv::to_double(row[1]));
    }
}

}  // namespace

std::vector<MemoryRecord> load_memory_records(std::istream& source, const std::string& base_dir) {
    std::vector<MemoryRecord> records;
    std::vector<std::string> problems;
    std::string line;
    int line_no = 0;
    while (std::getline(source, line)) {
        ++line_no;
        const std::string trimmed = csv::trim(line);
        if (trimmed.empty() || trimmed[0] == '#') continue;
        if (line_no == 1 && trimmed.rfind("label", 0) == 0) continue;  // header
        const std::vector<std::string> fields = csv::split_row(trimmed);
        try {
            if (fields.size() != 6)
                throw std::invalid_argument("expected 6 fields, got " +
                                            std::to_string(fields.size()));
            MemoryRecord record;
            record.label = fields[0];
            record.platform = parse_platform(fields[1]);
            record.protocol = parse_protocol(fields[2]);
            if (fields[3] == "true" || fields[3] == "1") record.universal = true;
            else if (fields[3] == "false" || fields[3] == "0") record.universal = false;
            else throw std::invalid_argument("universal must be true/false");
            record.max_efficiency = csv::to_double(fields[4]);
            record.curve_ref = fields[5];
            fill_curve(record, base_dir);
            record.validate();
            records.push_back(std::move(record));
        } catch (const std::exception& e) {
            problems.push_back("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!problems.empty()) {
        std::string msg = "memory record file rejected:";
        for (const std::string& p : problems) msg += "\n  " + p;
        throw std::invalid_argument(msg);
    }
    return records;
}

std::vector<MemoryRecord> load_memory_records_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open memory record file '" + path + "'");
    std::string dir = ".";
    const std::size_t slash = path.find_last_of('/');
    if (slash != std::string::npos) dir = path.substr(0, slash);
    return load_memory_records(in, dir);
}

MemoryRecord builtin_memory_record() {
    MemoryRecord record;
    record.label = "this-work cold-atom GEM";
    record.platform = MemoryPlatform::cold_atoms;
    record.protocol = MemoryProtocol::gem;
    record.universal = true;
    record.max_efficiency = 0.87;
    record.curve_ref = "thermal:0.87,1.24e-3,71e-3";
    record.decay_curve = thermal_model_curve(0.87, 1.24e-3, 71e-3);
    return record;
}

namespace {

double first_time_below(const MemoryRecord& record, double level) {
    if (record.decay_curve.empty()) return nan_value;
    if (record.decay_curve.front().second < level) return nan_value;
    for (std::size_t i = 1; i < record.decay_curve.size(); ++i) {
        const auto& [t0, e0] = record.decay_curve[i - 1];
        const auto& [t1, e1] = record.decay_curve[i];
        if (e1 < level) {
            const double f = (e0 - level) / (e0 - e1);
            return t0 + f * (t1 - t0);
        }
    }
    return nan_value;  // never decays below within the tabulated range
}

}  // namespace

MemoryComparisonReport compare_memory_records(const std::vector<MemoryRecord>& records,
                                              double attenuation_db_per_km, double group_index) {
    MemoryComparisonReport report;
    report.attenuation_db_per_km = attenuation_db_per_km;
    report.group_index = group_index;

    // fiber 50% time: eta = 1/2 at d = 3.0103 dB of attenuation
    const double d_km = 10.0 * std::log10(2.0) / attenuation_db_per_km;
    report.fiber_fifty_time = d_km * 1000.0 / (constants::speed_of_light / group_index);

    for (const MemoryRecord& record : records) {
        record.validate();
        MemoryComparisonRow row;
        row.label = record.label;
        row.max_efficiency = record.max_efficiency;
        row.one_over_e_time = first_time_below(record, record.max_efficiency / std::exp(1.0));
        row.fifty_pct_time = first_time_below(record, 0.5);
        // 1% margin: tabulated curves carry interpolation slop at the crossing
        row.beats_fiber_fifty = std::isfinite(row.fifty_pct_time) &&
                                row.fifty_pct_time > report.fiber_fifty_time * 1.01;
        row.fifty_ratio_vs_fiber = row.fifty_pct_time / report.fiber_fifty_time;

        // first time the record curve rises above the fiber curve
        row.fiber_cross_time = nan_value;
        for (std::size_t i = 0; i < record.decay_curve.size(); ++i) {
            const auto& [t, e] = record.decay_curve[i];
            const double fiber_eta =
                fiber_reference(t, attenuation_db_per_km, group_index).transmission;
            if (e > fiber_eta + 1e-12) {
                row.fiber_cross_time = t;
                break;
            }
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

const char* platform_name(MemoryPlatform p) {
    switch (p) {
        case MemoryPlatform::cold_atoms: return "cold_atoms";
        case MemoryPlatform::warm_vapour: return "warm_vapour";
        case MemoryPlatform::solid_state: return "solid_state";
        case MemoryPlatform::other: return "other";
    }
    return "other";
}

const char* protocol_name(MemoryProtocol p) {
    switch (p) {
        case MemoryProtocol::gem: return "GEM";
        case MemoryProtocol::eit: return "EIT";
        case MemoryProtocol::afc: return "AFC";
        case MemoryProtocol::raman: return "Raman";
        case MemoryProtocol::dlcz: return "DLCZ";
        case MemoryProtocol::crib: return "CRIB";
        case MemoryProtocol::rose: return "ROSE";
        case MemoryProtocol::hyper: return "HYPER";
        case MemoryProtocol::other: return "other";
    }
    return "other";
}

}  // namespace gem
