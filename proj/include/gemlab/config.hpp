#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gemlab/ensemble.hpp"
#include "gemlab/gem_solver.hpp"
#include "gemlab/spectroscopy.hpp"

namespace gem {

enum class RunKind { simulate, simulate_4wm, raman, decay_fit, tomography, tv, compare };

const char* run_kind_name(RunKind kind);

class ConfigError : public std::runtime_error {
  public:
    ConfigError(const std::string& msg, int line = 0)
        : std::runtime_error(line > 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
          line_number(line) {}
    int line_number;
};

struct AssertRule {
    std::string metric;
    std::optional<double> min;
    std::optional<double> max;
};

struct SimulateSection {
    double control_rabi = 0.0;   // rad/s
    double control_theta = 0.0;  // rad
    double t_write = 0.0, t_hold = 0.0, t_read = 0.0;
    double eta1_write = 0.0, eta1_read = 0.0;  // rad/s/m
    double eta2 = 0.0;                         // rad/s/m^2
    double delta0 = 0.0;                       // rad/s
    double delta0_read = std::numeric_limits<double>::quiet_NaN();  // rad/s, NaN: same as delta0
    bool hold_fields_off = false;
    double pulse_fwhm = 0.0, pulse_center = 0.0;
    double pulse_amplitude = 1.0;
    int pulse_count = 1;
    double pulse_spacing = 0.0;
    double carrier_detuning = 0.0;
    SolverGrid grid;
};

struct RamanSection {
    ZeemanManifold manifold;
    double omega_c = 0.0, delta = 0.0, gamma = 0.0, gamma0 = 0.0;
    double grid_min = 0.0, grid_max = 0.0;  // rad/s
    int grid_points = 801;
    double eta1 = 0.0;       // rad/s/m; nonzero -> broadened synthesis
    double length = 0.05;    // m, for broadened synthesis
    double noise_sigma = 0.0;
    bool do_fit = false;
    std::string input_csv;   // fit measured data instead of synthetic
};

struct DecayFitSection {
    std::string model = "thermal";  // thermal | quadratic | thermal_fixed_tau_l
    std::string input_csv;
    // synthesis (when no input file) and initial guesses
    double e0 = 0.8, tau_l = 1.24e-3, tau_d = 71e-3;
    double zeta = 0.0, sigma = 0.01, length = 0.05, gamma_sc = 0.0, t0 = 0.0;
    int synth_points = 40;
    double synth_t_max = 3e-3;
    double noise_sigma = 0.0;
};

struct TomographySection {
    double alpha_re = 0.0, alpha_im = 0.0;
    std::size_t pulses = 3000;
    double phase_drift = 0.0;  // rad
    double loss_eta = 1.0;     // channel efficiency applied before detection
    bool surfaces = true;
};

struct TvSection {
    std::string channel = "loss";  // identity | loss | classical
    double eta = 0.5;
    double gain = 1.0;
    double alpha_re = 2.0, alpha_im = 0.0;
    std::size_t samples = 20000;
    int bootstrap = 500;
    bool correct = false;
    double budget_spatial = 1.0, budget_visibility = 1.0, budget_heterodyne = 1.0,
           budget_qe = 1.0, budget_shot_dark = 1.0;
};

struct CompareSection {
    std::string records_csv;  // optional extra records
    bool include_builtin = true;
    double attenuation_db_per_km = 0.15;
    double group_index = 1.468;
};

struct ExperimentConfig {
    RunKind kind = RunKind::simulate;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string output_dir = ".";
    bool emit_csv = true, emit_json = true, emit_plotdata = false;

    EnsembleParams ensemble;
    SimulateSection simulate;
    RamanSection raman;
    DecayFitSection decay;
    TomographySection tomography;
    TvSection tv;
    CompareSection compare;
    std::vector<AssertRule> asserts;

    std::uint64_t config_hash = 0;  // over the resolved canonical form
};

// Parses and fully resolves a config file: defaults filled, units required
// on every physical quantity, unknown keys rejected with a line reference.
ExperimentConfig validate_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin = "<text>");

// Canonical "key = value" listing of the resolved config (hash input, and
// what `gemlab validate` echoes).
std::string canonical_config(const ExperimentConfig& config);

}  // namespace gem
