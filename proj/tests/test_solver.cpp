#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gemlab/gem_solver.hpp"
#include "matched_run.hpp"

using namespace gem;

TEST_CASE("zero input gives zero output and zero efficiency") {
    FieldTrace dark = matched_run::input_pulse(0.0);
    const SimulationResult r = solve_gem(matched_run::ensemble(), matched_run::schedule(), dark);
    CHECK(r.efficiency == 0.0);
    CHECK(r.output_trace.energy() == 0.0);
    CHECK(r.transmitted_trace.energy() == 0.0);
}

TEST_CASE("empty medium transmits the pulse") {
    EnsembleParams p = matched_run::ensemble();
    p.optical_depth = 0.0;
    const SimulationResult r = solve_gem(p, matched_run::schedule(), matched_run::input_pulse());
    CHECK(r.transmitted_fraction > 0.999);
    CHECK(r.efficiency < 1e-3);
}

TEST_CASE("matched-parameter run recalls near 89%") {
    const SimulationResult r =
        solve_gem(matched_run::ensemble(), matched_run::schedule(), matched_run::input_pulse());
    CHECK(r.efficiency > 0.84);
    CHECK(r.efficiency < 0.94);
    // recall appears after the flip
    double peak = 0.0, peak_t = 0.0;
    for (std::size_t i = 0; i < r.output_trace.size(); ++i) {
        if (std::norm(r.output_trace.amplitudes[i]) > peak) {
            peak = std::norm(r.output_trace.amplitudes[i]);
            peak_t = r.output_trace.time_at(i);
        }
    }
    CHECK(peak_t > matched_run::t_write);
    CHECK(peak_t < matched_run::t_write + 30e-6);
}

TEST_CASE("reported efficiency equals compute_efficiency over the recall window") {
    const SimulationResult r =
        solve_gem(matched_run::ensemble(), matched_run::schedule(), matched_run::input_pulse());
    const double direct = compute_efficiency(r.input_trace, r.output_trace, r.recall_window);
    CHECK(direct == doctest::Approx(r.efficiency).epsilon(1e-12));
    CHECK(direct == doctest::Approx(0.87).epsilon(0.06));
}

TEST_CASE("linearity: complex scaling of the input scales the output") {
    const EnsembleParams p = matched_run::ensemble();
    const ExperimentSchedule s = matched_run::schedule();
    const SimulationResult base = solve_gem(p, s, matched_run::input_pulse());

    const cplx c(0.3, -1.2);
    FieldTrace scaled = matched_run::input_pulse();
    for (cplx& a : scaled.amplitudes) a *= c;
    const SimulationResult r = solve_gem(p, s, scaled);

    CHECK(r.efficiency == doctest::Approx(base.efficiency).epsilon(1e-10));
    double max_dev = 0.0, max_ref = 0.0;
    for (std::size_t i = 0; i < base.output_trace.size(); ++i) {
        max_dev = std::max(max_dev,
                           std::abs(r.output_trace.amplitudes[i] - c * base.output_trace.amplitudes[i]));
        max_ref = std::max(max_ref, std::abs(c * base.output_trace.amplitudes[i]));
    }
    CHECK(max_dev < 1e-8 * max_ref);
}

TEST_CASE("passivity: output + transmitted energy bounded by the input") {
    for (double rabi : {two_pi * 4e6, two_pi * 9e6, two_pi * 14e6}) {
        const SimulationResult r =
            solve_gem(matched_run::ensemble(), matched_run::schedule(rabi), matched_run::input_pulse());
        const double in = r.input_trace.energy();
        const double out = r.transmitted_trace.energy() + r.output_trace.energy();
        CHECK(out <= in * (1.0 + 1e-3));
    }
}

TEST_CASE("gauge invariance: common offset in delta0 and carrier detuning") {
    const EnsembleParams p = matched_run::ensemble();
    const SimulationResult base = solve_gem(p, matched_run::schedule(), matched_run::input_pulse());

    const double offset = two_pi * 37e3;
    ExperimentSchedule shifted = matched_run::schedule();
    shifted.gradient.delta0 += offset;
    FieldTrace input = matched_run::input_pulse();
    input.carrier_detuning += offset;
    const SimulationResult r = solve_gem(p, shifted, input);
    CHECK(r.efficiency == doctest::Approx(base.efficiency).epsilon(1e-6));
}

TEST_CASE("efficiency is monotone in optical depth at fixed broadened width") {
    double prev = -1.0;
    for (double od : {50.0, 150.0, 300.0, 400.0, 488.0}) {
        EnsembleParams p = matched_run::ensemble();
        p.optical_depth = od;
        const SimulationResult r = solve_gem(p, matched_run::schedule(), matched_run::input_pulse());
        CHECK(r.efficiency >= prev - 1e-9);
        prev = r.efficiency;
    }
}

TEST_CASE("determinism: identical inputs give bit-identical results") {
    const SimulationResult a =
        solve_gem(matched_run::ensemble(), matched_run::schedule(), matched_run::input_pulse());
    const SimulationResult b =
        solve_gem(matched_run::ensemble(), matched_run::schedule(), matched_run::input_pulse());
    REQUIRE(a.output_trace.size() == b.output_trace.size());
    CHECK(a.efficiency == b.efficiency);
    for (std::size_t i = 0; i < a.output_trace.size(); ++i)
        CHECK(a.output_trace.amplitudes[i] == b.output_trace.amplitudes[i]);
}

TEST_CASE("unresolved grid is refused with a diagnostic") {
    SolverGrid grid;
    grid.nz = 64;
    grid.dt = 1e-5;  // far too coarse for a 197 kHz broadened line
    CHECK_THROWS_WITH_AS(
        solve_gem(matched_run::ensemble(), matched_run::schedule(), matched_run::input_pulse(), grid),
        doctest::Contains("does not resolve"), std::invalid_argument);
}

TEST_CASE("one-photon detuning below the linewidth is refused") {
    EnsembleParams p = matched_run::ensemble();
    p.raman_detuning = 0.5 * p.excited_linewidth;
    CHECK_THROWS_AS(solve_gem(p, matched_run::schedule(), matched_run::input_pulse()),
                    std::invalid_argument);
}

TEST_CASE("marginal adiabaticity is warned about") {
    EnsembleParams p = matched_run::ensemble();
    p.raman_detuning = 5.0 * p.excited_linewidth;
    const SimulationResult r = solve_gem(p, matched_run::schedule(), matched_run::input_pulse());
    REQUIRE(!r.warnings.empty());
}

TEST_CASE("spinwave snapshots carry the stored pulse") {
    const SimulationResult r =
        solve_gem(matched_run::ensemble(), matched_run::schedule(), matched_run::input_pulse());
    REQUIRE(r.spinwave_snapshots.size() >= 3);
    // at the flip the medium holds most of the excitation
    double best_norm = 0.0;
    double width = 0.0;
    for (const SpinwaveState& snap : r.spinwave_snapshots) {
        double n = 0.0;
        for (const cplx& a : snap.coherence) n += std::norm(a);
        if (n > best_norm) {
            best_norm = n;
            width = spinwave_envelope_width(snap);
        }
    }
    CHECK(best_norm > 0.0);
    // the envelope width should be a few mm for the 6.66 us pulse mapped
    // through the 197 kHz / 5 cm gradient
    CHECK(width > 1e-3);
    CHECK(width < 2e-2);
}

TEST_CASE("4WM: enormous detuning decouples the idler") {
    EnsembleParams p = matched_run::ensemble();
    p.raman_detuning *= 100.0;
    // at the calibrated control value; everything scales as 1/Delta^4
    const ExperimentSchedule s = matched_run::schedule(two_pi * 5.19e6);
    const FieldTrace input = matched_run::input_pulse();
    const SimulationResult with = solve_gem_4wm(p, s, input);
    const SimulationResult without = solve_gem(p, s, input);
    CHECK(with.idler_fraction < 1e-6);
    const double in_e = without.input_trace.energy();
    double dev = 0.0;
    for (std::size_t i = 0; i < with.output_trace.size(); ++i)
        dev = std::max(dev, std::abs(with.output_trace.amplitudes[i] -
                                     without.output_trace.amplitudes[i]));
    CHECK(dev * dev < 1e-4 * in_e / without.output_trace.dt);
    CHECK(std::abs(with.probe_gain) < 1e-4);
}

TEST_CASE("4WM at the matched parameters: idler fraction and probe gain near 0.9%") {
    const SimulationResult r =
        solve_gem_4wm(matched_run::ensemble(), matched_run::schedule(), matched_run::input_pulse());
    CHECK(r.idler_fraction > 0.004);
    CHECK(r.idler_fraction < 0.014);
    CHECK(r.probe_gain > 0.004);
    CHECK(r.probe_gain < 0.014);
    REQUIRE(r.idler_trace.has_value());
    CHECK(r.idler_trace->carrier_detuning ==
          doctest::Approx(-2.0 * constants::rb87_hyperfine_splitting));
}

TEST_CASE("4WM: probe output exceeds the passive bound only by the idler-mediated gain") {
    const SimulationResult r =
        solve_gem_4wm(matched_run::ensemble(), matched_run::schedule(), matched_run::input_pulse());
    CHECK(r.idler_fraction >= 0.0);
    const double in = r.input_trace.energy();
    const double probe_out = r.transmitted_trace.energy() + r.output_trace.energy();
    // every idler photon pairs with an extra probe photon
    CHECK(probe_out <= in * (1.0 + r.idler_fraction + 1e-3));
}

TEST_CASE("4WM at small OD matches the first-order perturbative oracle") {
    EnsembleParams p = matched_run::ensemble();
    p.optical_depth = 1.0;
    const ExperimentSchedule s = matched_run::schedule();
    const FieldTrace input = matched_run::input_pulse();

    const SimulationResult full = solve_gem_4wm(p, s, input);

    // Independent route: integrate the probe-only dynamics with a separate
    // forward-Euler scheme, then quadrature the first-order idler
    //   E_i*(L, t) = -i r sqrt(K) integral of alpha dz
    // with the coupling constants rebuilt from the calibration formulas.
    const double gsc = p.excited_linewidth *
                       std::pow(matched_run::control_rabi / (2.0 * p.raman_detuning), 2);
    const double gamma_c = p.ground_decoherence + 0.5 * gsc;
    const double d_r = p.optical_depth * gsc / (p.ground_decoherence + gsc);
    const double coupling_sq = d_r * gamma_c / (2.0 * p.length);  // N g^2
    const double g = std::sqrt(coupling_sq);
    const double d_near = constants::rb87_hyperfine_splitting - p.raman_detuning;
    const double d_far = constants::rb87_hyperfine_splitting + p.raman_detuning;
    const double ratio =
        p.raman_detuning * std::sqrt(1.0 / (d_near * d_near) + 1.0 / (d_far * d_far));

    const int nz = 192;
    const double dz = p.length / nz;
    const double dt = 1.0 / (40.0 * 210e3) / 8.0;  // fine step for the Euler pass
    const std::size_t n_steps = static_cast<std::size_t>(std::ceil(s.t_total / dt));

    std::vector<cplx> alpha(static_cast<std::size_t>(nz) + 1, cplx(0.0));
    std::vector<cplx> field(alpha.size());
    double idler_energy = 0.0;
    for (std::size_t step = 0; step < n_steps; ++step) {
        const double t = dt * static_cast<double>(step);
        // boundary value by linear interpolation of the input record
        const double si = (t - input.t0) / input.dt;
        cplx e_in(0.0);
        if (si > 0.0 && si < static_cast<double>(input.size() - 1)) {
            const std::size_t i0 = static_cast<std::size_t>(si);
            const double f = si - static_cast<double>(i0);
            e_in = input.amplitudes[i0] * (1.0 - f) + input.amplitudes[i0 + 1] * f;
        }
        field[0] = e_in;
        cplx alpha_sum(0.0);
        for (int j = 1; j <= nz; ++j) {
            field[static_cast<std::size_t>(j)] =
                field[static_cast<std::size_t>(j - 1)] +
                cplx(0.0, g) * 0.5 * dz *
                    (alpha[static_cast<std::size_t>(j - 1)] + alpha[static_cast<std::size_t>(j)]);
            alpha_sum += 0.5 * dz * (alpha[static_cast<std::size_t>(j - 1)] +
                                     alpha[static_cast<std::size_t>(j)]);
        }
        idler_energy += std::norm(ratio * g * alpha_sum) * dt;
        for (int j = 0; j <= nz; ++j) {
            const std::size_t k = static_cast<std::size_t>(j);
            const double delta =
                s.gradient.delta_at(dz * static_cast<double>(j), t, p.length);
            alpha[k] += dt * (-cplx(gamma_c, delta) * alpha[k] + cplx(0.0, g) * field[k]);
        }
    }
    const double oracle_fraction = idler_energy / input.energy();

    CHECK(oracle_fraction > 0.0);
    CHECK(full.idler_fraction == doctest::Approx(oracle_fraction).epsilon(0.10));
}

TEST_CASE("convergence study: efficiency settles below 1e-3") {
    SolverGrid base;
    base.nz = 128;
    const ConvergenceReport report = convergence_study(
        matched_run::ensemble(), matched_run::schedule(), matched_run::input_pulse(), 3, base);
    REQUIRE(report.rows.size() == 3);
    CHECK(report.final_change < 1e-3);
    CHECK(report.flags.empty());

    SUBCASE("empty medium converges trivially at every level") {
        EnsembleParams p = matched_run::ensemble();
        p.optical_depth = 0.0;
        const ConvergenceReport empty = convergence_study(p, matched_run::schedule(),
                                                          matched_run::input_pulse(), 3, base);
        for (const ConvergenceRow& row : empty.rows) CHECK(row.efficiency < 1e-3);
    }
}

TEST_CASE("doubling only nz changes the efficiency by less than 1e-3") {
    SolverGrid coarse;  // defaults: nz = 512, auto dt
    const SimulationResult a =
        solve_gem(matched_run::ensemble(), matched_run::schedule(), matched_run::input_pulse(), coarse);
    SolverGrid fine;
    fine.nz = 1024;
    fine.dt = a.grid.dt;
    const SimulationResult b =
        solve_gem(matched_run::ensemble(), matched_run::schedule(), matched_run::input_pulse(), fine);
    CHECK(std::abs(a.efficiency - b.efficiency) < 1e-3);
}
