#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gemlab/tomography.hpp"

namespace gem {

// Signal-transfer / conditional-variance point. T sums the two quadrature
// SNR ratios (identity channel -> 2); V is the geometric mean of the two
// conditional variances in vacuum units (identity -> 0, vacuum input of a
// blocked channel -> 1).
struct TVPoint {
    double t = 0.0;
    double v = 0.0;
    double err_t = 0.0;
    double err_v = 0.0;
};

struct TVOptions {
    int bootstrap_resamples = 500;
    std::uint64_t seed = 1;
};

// Estimator (pinned convention): quadratures are taken along/orthogonal to
// each ensemble's own mean; variances are Wigner-domain in vacuum units
// (2 Var_Q - 1); the amplitude gain g = |<out>| / |<in>| gives
//   T_q = g^2 V_in,q / V_out,q         (SNR_out / SNR_in)
//   V_q = V_out,q - g^2 V_in,q         (min over gain of Var(q_out - g q_in)
//                                       for a linear channel)
// Errors are bootstrap standard deviations over independent resamples.
TVPoint tv_from_ensembles(const QuadratureEnsemble& input, const QuadratureEnsemble& output,
                          const TVOptions& options = {});

struct DetectionBudget {
    double spatial_filter_transmission = 1.0;
    double fringe_visibility_squared = 1.0;
    double heterodyne_penalty = 1.0;
    double detector_qe = 1.0;
    double shotnoise_to_darknoise_factor = 1.0;

    double total_eta() const;
    void validate() const;
};

// Inverts the pure-loss detection map: T/eta and (V - (1 - eta))/eta, with
// error bars scaled by the same Jacobian.
TVPoint correct_detection(const TVPoint& raw, const DetectionBudget& budget);

struct BoundaryCurves {
    std::vector<TVPoint> classical;    // measure-and-recreate, parametrized by gain
    std::vector<TVPoint> linear_loss;  // pure loss, V = 1 - T/2
    double no_cloning_t_min = 1.0;     // region: T > 1, V < 1
    double no_cloning_v_max = 1.0;
};

BoundaryCurves boundary_curves(int points_per_curve = 200);

struct FiberReference {
    double transmission = 1.0;
    TVPoint tv;
    double distance_km = 0.0;
};

FiberReference fiber_reference(double time, double attenuation_db_per_km = 0.15,
                               double group_index = 1.468);

enum class MemoryPlatform { cold_atoms, warm_vapour, solid_state, other };
enum class MemoryProtocol { gem, eit, afc, raman, dlcz, crib, rose, hyper, other };

struct MemoryRecord {
    std::string label;  // institute/year
    MemoryPlatform platform = MemoryPlatform::other;
    MemoryProtocol protocol = MemoryProtocol::other;
    bool universal = true;  // capture-and-release vs recall-only
    double max_efficiency = 0.0;
    std::vector<std::pair<double, double>> decay_curve;  // (t_s, efficiency), t increasing
    std::string curve_ref;  // side-car path or inline model spec

    void validate() const;
    double efficiency_at(double t) const;  // linear interpolation, 0 beyond the curve
};

// CSV row: label, platform, protocol, universal, max_efficiency, curve_ref.
// curve_ref is either "thermal:E0,tau_l_s,tau_d_s", "fiber:", or the path of
// a side-car CSV (t_s, efficiency) resolved relative to `base_dir`. All rows
// must parse; otherwise the whole file is rejected with per-row diagnostics.
std::vector<MemoryRecord> load_memory_records(std::istream& source, const std::string& base_dir);
std::vector<MemoryRecord> load_memory_records_file(const std::string& path);

// The headline record of this artifact: 87% peak efficiency with the
// thermal decay constants of the co-propagating configuration.
MemoryRecord builtin_memory_record();

struct MemoryComparisonRow {
    std::string label;
    double max_efficiency = 0.0;
    double one_over_e_time = 0.0;       // s; NaN if the curve never drops that far
    double fifty_pct_time = 0.0;        // s; NaN if never at/above 50%
    double fiber_cross_time = 0.0;      // s; first time the record beats the fiber, NaN if never
    bool beats_fiber_fifty = false;     // 50% time beyond the fiber's 50% time
    double fifty_ratio_vs_fiber = 0.0;  // record 50% time / fiber 50% time
};

struct MemoryComparisonReport {
    double fiber_fifty_time = 0.0;  // s
    double attenuation_db_per_km = 0.15;
    double group_index = 1.468;
    std::vector<MemoryComparisonRow> rows;
};

MemoryComparisonReport compare_memory_records(const std::vector<MemoryRecord>& records,
                                              double attenuation_db_per_km = 0.15,
                                              double group_index = 1.468);

const char* platform_name(MemoryPlatform p);
const char* protocol_name(MemoryProtocol p);

}  // namespace gem
