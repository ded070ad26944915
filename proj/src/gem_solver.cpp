#include "gemlab/gem_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gem {

double spinwave_envelope_width(const SpinwaveState& state) {
    double w_sum = 0.0, z_sum = 0.0, zz_sum = 0.0;
    for (std::size_t i = 0; i < state.z_grid.size(); ++i) {
        const double w = std::norm(state.coherence[i]);
        w_sum += w;
        z_sum += w * state.z_grid[i];
        zz_sum += w * state.z_grid[i] * state.z_grid[i];
    }
    if (w_sum <= 0.0) return 0.0;
    const double mean = z_sum / w_sum;
    return std::sqrt(std::max(0.0, zz_sum / w_sum - mean * mean));
}

namespace {

// Coupling figures for one control amplitude. The probe coupling is split
// symmetrically between the drive (g) and back-action (N g) factors; only
// the product N g^2 is physical.
struct Coupling {
    double g = 0.0;         // sqrt(N g^2)
    double gamma_c = 0.0;   // coherence decay gamma0 + Gamma_sc / 2
};

Coupling coupling_at(const EnsembleParams& params, const ControlField& control, double t) {
    Coupling c;
    const double omega_c = control.rabi_at(t);
    const double ratio = omega_c / (2.0 * params.raman_detuning);
    const double gamma_sc = params.excited_linewidth * ratio * ratio;
    c.gamma_c = params.ground_decoherence + 0.5 * gamma_sc;
    const double gamma_r = params.ground_decoherence + gamma_sc;
    const double d_r = gamma_r > 0.0 ? params.optical_depth * gamma_sc / gamma_r : 0.0;
    const double coupling_sq = d_r * c.gamma_c / (2.0 * params.length);  // N g^2
    c.g = std::sqrt(std::max(0.0, coupling_sq));
    return c;
}

double max_detuning_span(const EnsembleParams& params, const ExperimentSchedule& schedule) {
    // delta is piecewise in t and quadratic in z: extremes live on the
    // corners plus the vertex of the parabola.
    double lo = 0.0, hi = 0.0;
    bool first = true;
    const double eps = schedule.t_total * 1e-9;
    const std::vector<double> times = {eps, schedule.gradient.flip_time - eps,
                                       schedule.gradient.flip_time + eps,
                                       schedule.t_total - eps};
    std::vector<double> zs = {0.0, 0.5 * params.length, params.length};
    if (schedule.gradient.eta2 != 0.0) {
        for (double t : times) {
            const double eta1 = schedule.gradient.eta1_at(t);
            const double zv = 0.5 * params.length - eta1 / (2.0 * schedule.gradient.eta2);
            if (zv > 0.0 && zv < params.length) zs.push_back(zv);
        }
    }
    for (double t : times) {
        if (t < 0.0 || t > schedule.t_total) continue;
        for (double z : zs) {
            const double d = schedule.gradient.delta_at(z, t, params.length);
            if (first || d < lo) lo = d;
            if (first || d > hi) hi = d;
            first = false;
        }
    }
    return hi - lo;
}

double auto_dt(const EnsembleParams& params, const ExperimentSchedule& schedule) {
    const double width_hz =
        std::max(std::abs(schedule.gradient.eta1_write), std::abs(schedule.gradient.eta1_read)) *
        params.length / two_pi;
    const double span_hz = max_detuning_span(params, schedule) / two_pi;
    const double resolve_hz = std::max(width_hz, span_hz);
    if (resolve_hz > 0.0) return 1.0 / (40.0 * resolve_hz);
    throw std::invalid_argument("solve_gem: grid.dt must be given when no gradient is applied");
}

cplx input_at(const FieldTrace& input, double t) {
    if (input.amplitudes.empty()) return cplx(0.0);
    const double s = (t - input.t0) / input.dt;
    if (s <= 0.0 || s >= static_cast<double>(input.size() - 1)) {
        // outside the recorded input: treat as dark
        if (s == 0.0) return input.amplitudes.front();
        return cplx(0.0);
    }
    const std::size_t i = static_cast<std::size_t>(s);
    const double f = s - static_cast<double>(i);
    return input.amplitudes[i] * (1.0 - f) + input.amplitudes[i + 1] * f;
}

struct SolveContext {
    const EnsembleParams& params;
    const ExperimentSchedule& schedule;
    const FieldTrace& input;
    int nz;
    double dz;
    double dt;
    bool with_idler;
    double idler_ratio;  // Delta / (Delta + omega_hf)

    std::vector<double> z_nodes;
    std::vector<double> delta_buf;

    // Field profiles reconstructed from the coherence by cumulative
    // trapezoid along z (the fields are slaved to alpha in this model).
    void fields_from_coherence(const std::vector<cplx>& alpha, double t, const Coupling& c,
                               std::vector<cplx>& e_probe, std::vector<cplx>& b_idler) const {
        const cplx i_g(0.0, c.g);
        const double nu = input.carrier_detuning;
        const cplx boundary = input_at(input, t) * std::exp(cplx(0.0, -nu * t));
        e_probe[0] = boundary;
        for (int j = 1; j <= nz; ++j)
            e_probe[static_cast<std::size_t>(j)] =
                e_probe[static_cast<std::size_t>(j - 1)] +
                i_g * 0.5 * dz *
                    (alpha[static_cast<std::size_t>(j - 1)] + alpha[static_cast<std::size_t>(j)]);
        if (with_idler) {
            const cplx mi_rg(0.0, -c.g * idler_ratio);
            b_idler[0] = cplx(0.0);
            for (int j = 1; j <= nz; ++j)
                b_idler[static_cast<std::size_t>(j)] =
                    b_idler[static_cast<std::size_t>(j - 1)] +
                    mi_rg * 0.5 * dz *
                        (alpha[static_cast<std::size_t>(j - 1)] +
                         alpha[static_cast<std::size_t>(j)]);
        }
    }

    void rhs(const std::vector<cplx>& alpha, double t, std::vector<cplx>& d_alpha,
             std::vector<cplx>& e_probe, std::vector<cplx>& b_idler) {
        const Coupling c = coupling_at(params, schedule.control, t);
        fields_from_coherence(alpha, t, c, e_probe, b_idler);
        for (int j = 0; j <= nz; ++j) {
            const std::size_t k = static_cast<std::size_t>(j);
            const double delta = schedule.gradient.delta_at(z_nodes[k], t, params.length);
            cplx drive = cplx(0.0, c.g) * e_probe[k];
            if (with_idler) drive += cplx(0.0, c.g * idler_ratio) * b_idler[k];
            d_alpha[k] = -cplx(c.gamma_c, delta) * alpha[k] + drive;
        }
    }
};

SimulationResult solve_internal(const EnsembleParams& params, const ExperimentSchedule& schedule,
                                const FieldTrace& input, SolverGrid grid, bool with_idler) {
    params.validate();
    schedule.validate();
    if (params.raman_detuning < params.excited_linewidth)
        throw std::invalid_argument("solve_gem: one-photon detuning below the excited linewidth; "
                                    "the adiabatic model does not apply");
    if (grid.nz < 8) throw std::invalid_argument("solve_gem: nz too small");

    SimulationResult result;
    if (!params.adiabatic_ok())
        result.warnings.push_back("Delta < 10 Gamma: adiabatic elimination is marginal");

    if (grid.dt <= 0.0) grid.dt = auto_dt(params, schedule);

    // Grid refusal: the time step must resolve the full detuning span and
    // the content of the input record itself.
    const double span_hz = max_detuning_span(params, schedule) / two_pi;
    if (span_hz > 0.0 && grid.dt > 1.0 / (20.0 * span_hz))
        throw std::invalid_argument(
            "solve_gem: dt = " + std::to_string(grid.dt) + " s does not resolve the detuning span "
            + std::to_string(span_hz) + " Hz; need dt <= " + std::to_string(1.0 / (20.0 * span_hz)));
    if (input.dt > 0.0 && grid.dt > 4.0 * input.dt)
        throw std::invalid_argument(
            "solve_gem: dt = " + std::to_string(grid.dt) +
            " s undersamples the input pulse (recorded at dt = " + std::to_string(input.dt) +
            " s); need dt <= " + std::to_string(4.0 * input.dt));

    // Idler coupling relative to the probe: the channel runs through the
    // intermediate resonances on both sides of the control frequency, at
    // omega_hf -+ Delta; the two routes are combined in quadrature.
    const double d_near = constants::rb87_hyperfine_splitting - params.raman_detuning;
    const double d_far = constants::rb87_hyperfine_splitting + params.raman_detuning;
    if (with_idler && std::abs(d_near) < params.excited_linewidth)
        throw std::invalid_argument(
            "solve_gem_4wm: control resonant with the far hyperfine transition");
    const double idler_ratio =
        params.raman_detuning * std::sqrt(1.0 / (d_near * d_near) + 1.0 / (d_far * d_far));

    SolveContext ctx{params,
                     schedule,
                     input,
                     grid.nz,
                     params.length / static_cast<double>(grid.nz),
                     grid.dt,
                     with_idler,
                     idler_ratio,
                     {},
                     {}};
    ctx.z_nodes.resize(static_cast<std::size_t>(grid.nz) + 1);
    for (int j = 0; j <= grid.nz; ++j)
        ctx.z_nodes[static_cast<std::size_t>(j)] = ctx.dz * static_cast<double>(j);

    const std::size_t n_nodes = ctx.z_nodes.size();
    const std::size_t n_steps =
        static_cast<std::size_t>(std::ceil(schedule.t_total / grid.dt)) + 1;

    std::vector<cplx> alpha(n_nodes, cplx(0.0));
    std::vector<cplx> k1(n_nodes), k2(n_nodes), k3(n_nodes), k4(n_nodes), tmp(n_nodes);
    std::vector<cplx> e_buf(n_nodes), b_buf(with_idler ? n_nodes : 0);

    result.grid = grid;
    result.input_trace.t0 = 0.0;
    result.input_trace.dt = grid.dt;
    result.input_trace.carrier_detuning = input.carrier_detuning;
    result.input_trace.amplitudes.resize(n_steps);

    std::vector<cplx> out_full(n_steps), idler_full(with_idler ? n_steps : 0);

    // Snapshot times: evenly spaced plus the flip instant.
    const int n_snapshots = 9;
    std::vector<double> snap_times;
    for (int s = 0; s < n_snapshots; ++s)
        snap_times.push_back(schedule.t_total * static_cast<double>(s) /
                             static_cast<double>(n_snapshots - 1));
    snap_times.push_back(schedule.gradient.flip_time);
    std::sort(snap_times.begin(), snap_times.end());
    std::size_t next_snap = 0;

    const double nu = input.carrier_detuning;
    for (std::size_t step = 0; step < n_steps; ++step) {
        const double t = grid.dt * static_cast<double>(step);

        // record boundary and output samples at the step time
        const Coupling c_now = coupling_at(params, schedule.control, t);
        ctx.fields_from_coherence(alpha, t, c_now, e_buf, b_buf);
        const cplx unwind = std::exp(cplx(0.0, nu * t));
        result.input_trace.amplitudes[step] = input_at(input, t);
        out_full[step] = e_buf[n_nodes - 1] * unwind;
        if (with_idler) idler_full[step] = std::conj(b_buf[n_nodes - 1]);

        while (next_snap < snap_times.size() && t >= snap_times[next_snap] - 0.5 * grid.dt) {
            SpinwaveState snap;
            snap.z_grid = ctx.z_nodes;
            snap.coherence = alpha;
            snap.timestamp = t;
            result.spinwave_snapshots.push_back(std::move(snap));
            ++next_snap;
        }
        if (step + 1 == n_steps) break;

        ctx.rhs(alpha, t, k1, e_buf, b_buf);
        for (std::size_t j = 0; j < n_nodes; ++j) tmp[j] = alpha[j] + 0.5 * grid.dt * k1[j];
        ctx.rhs(tmp, t + 0.5 * grid.dt, k2, e_buf, b_buf);
        for (std::size_t j = 0; j < n_nodes; ++j) tmp[j] = alpha[j] + 0.5 * grid.dt * k2[j];
        ctx.rhs(tmp, t + 0.5 * grid.dt, k3, e_buf, b_buf);
        for (std::size_t j = 0; j < n_nodes; ++j) tmp[j] = alpha[j] + grid.dt * k3[j];
        ctx.rhs(tmp, t + grid.dt, k4, e_buf, b_buf);
        for (std::size_t j = 0; j < n_nodes; ++j)
            alpha[j] += grid.dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);

        if (step % 64 == 0 && !std::isfinite(std::norm(alpha[n_nodes / 2])))
            throw std::runtime_error("solve_gem: NaN in state at step " + std::to_string(step) +
                                     ", t = " + std::to_string(t) + " s");
    }
    if (!std::isfinite(std::norm(alpha[n_nodes / 2])))
        throw std::runtime_error("solve_gem: NaN in state at the final step");

    // Split E(L, t) at the gradient flip into transmitted and recalled parts.
    const std::size_t split =
        std::min(n_steps, static_cast<std::size_t>(
                              std::ceil(schedule.gradient.flip_time / grid.dt)));
    result.transmitted_trace.t0 = 0.0;
    result.transmitted_trace.dt = grid.dt;
    result.transmitted_trace.carrier_detuning = nu;
    result.transmitted_trace.amplitudes.assign(out_full.begin(),
                                               out_full.begin() + static_cast<long>(split));
    result.output_trace.t0 = grid.dt * static_cast<double>(split);
    result.output_trace.dt = grid.dt;
    result.output_trace.carrier_detuning = nu;
    result.output_trace.amplitudes.assign(out_full.begin() + static_cast<long>(split),
                                          out_full.end());
    if (with_idler) {
        FieldTrace idler;
        idler.t0 = 0.0;
        idler.dt = grid.dt;
        idler.carrier_detuning = nu - 2.0 * constants::rb87_hyperfine_splitting;
        idler.amplitudes = std::move(idler_full);
        result.idler_trace = std::move(idler);
    }

    const double input_energy = result.input_trace.energy();
    if (input_energy > 0.0) {
        result.recall_window =
            find_recall_window(result.output_trace, result.output_trace.t0);
        if (result.recall_window.second > result.recall_window.first)
            result.efficiency = result.output_trace.energy_in_window(
                                    result.recall_window.first, result.recall_window.second) /
                                input_energy;
        result.transmitted_fraction =
            (result.transmitted_trace.energy() + result.output_trace.energy()) / input_energy -
            result.efficiency;
        if (with_idler) result.idler_fraction = result.idler_trace->energy() / input_energy;
    }
    return result;
}

}  // namespace

SimulationResult solve_gem(const EnsembleParams& params, const ExperimentSchedule& schedule,
                           const FieldTrace& input, SolverGrid grid) {
    return solve_internal(params, schedule, input, grid, false);
}

SimulationResult solve_gem_4wm(const EnsembleParams& params, const ExperimentSchedule& schedule,
                               const FieldTrace& input, SolverGrid grid) {
    SimulationResult with = solve_internal(params, schedule, input, grid, true);
    SimulationResult without = solve_internal(params, schedule, input, grid.dt > 0.0
                                                  ? grid
                                                  : with.grid, false);
    if (without.efficiency > 0.0)
        with.probe_gain = with.efficiency / without.efficiency - 1.0;
    return with;
}

ConvergenceReport convergence_study(const EnsembleParams& params,
                                    const ExperimentSchedule& schedule, const FieldTrace& input,
                                    int refinement_levels, SolverGrid grid) {
    if (refinement_levels < 3)
        throw std::invalid_argument("convergence_study: need at least 3 levels");
    if (grid.dt <= 0.0) grid.dt = auto_dt(params, schedule);

    ConvergenceReport report;
    for (int level = 0; level < refinement_levels; ++level) {
        SolverGrid g;
        g.nz = grid.nz << level;
        g.dt = grid.dt / static_cast<double>(1 << level);
        const SimulationResult r = solve_gem(params, schedule, input, g);
        report.rows.push_back({g.nz, params.length / g.nz, g.dt, r.efficiency});
    }

    const std::size_t n = report.rows.size();
    std::vector<double> diffs;
    for (std::size_t i = 0; i + 1 < n; ++i)
        diffs.push_back(std::abs(report.rows[i + 1].efficiency - report.rows[i].efficiency));
    report.final_change = diffs.back();
    for (std::size_t i = 0; i + 1 < diffs.size(); ++i) {
        if (diffs[i + 1] > diffs[i] && diffs[i + 1] > 1e-12) report.monotone = false;
    }
    const double d1 = diffs[diffs.size() - 2], d2 = diffs.back();
    if (d2 > 0.0 && d1 > 0.0) {
        report.observed_order = std::log2(d1 / d2);
    } else {
        report.observed_order = 8.0;  // differences at the noise floor
    }
    if (!report.monotone) report.flags.push_back("non-monotone refinement");
    if (report.observed_order < 1.0) report.flags.push_back("observed order below 1");
    return report;
}

}  // namespace gem
