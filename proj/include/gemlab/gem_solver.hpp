#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gemlab/ensemble.hpp"
#include "gemlab/schedule.hpp"
#include "gemlab/trace.hpp"

namespace gem {

struct SolverGrid {
    int nz = 512;     // longitudinal cells over the medium
    double dt = 0.0;  // s; 0 -> 1 / (40 x broadened width)
};

// Ground-state coherence profile at a fixed time.
struct SpinwaveState {
    std::vector<double> z_grid;    // m, covers [0, L]
    std::vector<cplx> coherence;
    double timestamp = 0.0;        // s
};

// rms width of |alpha(z)|^2; for a Gaussian-pulse spinwave this is the
// sigma entering the quadratic decay model.
double spinwave_envelope_width(const SpinwaveState& state);

struct SimulationResult {
    FieldTrace input_trace;        // input resampled onto the solver grid
    FieldTrace transmitted_trace;  // E(L, t) before the gradient flip
    FieldTrace output_trace;       // E(L, t) from the flip onwards
    std::optional<FieldTrace> idler_trace;  // 4WM only, at z = L
    std::vector<SpinwaveState> spinwave_snapshots;
    double efficiency = 0.0;       // recall-window output energy / input energy
    double transmitted_fraction = 0.0;  // all non-echo output energy / input energy
    double idler_fraction = 0.0;   // idler output energy / probe input energy
    double probe_gain = 0.0;       // 4WM probe output relative to the two-field solve
    std::pair<double, double> recall_window{0.0, 0.0};
    SolverGrid grid;
    std::vector<std::string> warnings;
};

// Integrates the adiabatically eliminated two-field memory model
//   d(alpha)/dt = -(gamma0 + Gamma_sc/2 + i delta(z,t)) alpha + i g E
//   dE/dz       = i N g alpha
// with N g^2 calibrated so the static on-resonance transmission matches the
// Raman line depth of the spectroscopy module. Method of lines: RK4 in time,
// second-order integration along z. Deterministic; identical inputs give
// bit-identical results.
SimulationResult solve_gem(const EnsembleParams& params, const ExperimentSchedule& schedule,
                           const FieldTrace& input, SolverGrid grid = {});

// Three-field variant with an idler channel coupled to the same coherence
// through the control field. The idler carrier sits two hyperfine splittings
// below the probe; its coupling is the probe's scaled by the quadrature sum
// of the two intermediate-state routes at omega_hf -+ Delta.
SimulationResult solve_gem_4wm(const EnsembleParams& params, const ExperimentSchedule& schedule,
                               const FieldTrace& input, SolverGrid grid = {});

struct ConvergenceRow {
    int nz = 0;
    double dz = 0.0;
    double dt = 0.0;
    double efficiency = 0.0;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;   // coarsest first
    double observed_order = 0.0;        // from the last three rows
    double final_change = 0.0;          // |eff(last) - eff(previous)|
    bool monotone = true;               // successive-difference decrease
    std::vector<std::string> flags;
};

// Repeats the solve on successively refined (nz, dt) grids, halving both per
// level from `grid`. Needs at least 3 levels.
ConvergenceReport convergence_study(const EnsembleParams& params,
                                    const ExperimentSchedule& schedule, const FieldTrace& input,
                                    int refinement_levels, SolverGrid grid = {});

}  // namespace gem
