#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gemlab/constants.hpp"
#include "gemlab/spectroscopy.hpp"
#include "oracles.hpp"

using namespace gem;

namespace {

constexpr double delta_lab = two_pi * 325e6;
constexpr double gamma_d1 = two_pi * 5.75e6;
constexpr double omega_cal = two_pi * 5.19e6;

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / static_cast<double>(n - 1);
    return v;
}

ZeemanManifold reference_manifold() {
    ZeemanManifold m;
    m.od_per_line = {6.3, 38.0, 488.0};
    m.bias_field_tesla = 0.5e-4;
    return m;
}

}  // namespace

TEST_CASE("no control field means unit transmission") {
    for (double d2 : linspace(-two_pi * 2e6, two_pi * 2e6, 11)) {
        const cplx t = raman_transmission(d2, 488.0, 0.0, delta_lab, gamma_d1, 0.0);
        CHECK(std::abs(t) == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("far from line center the line is transparent") {
    // the OD 488 line is deep; "far" here means the Lorentzian tail has
    // fallen below d_R, i.e. many hundred linewidths out
    const double gamma0 = two_pi * 100.0;
    const double ratio = omega_cal / (2.0 * delta_lab);
    const double gamma_r = gamma0 + gamma_d1 * ratio * ratio;
    const double center = omega_cal * omega_cal / (4.0 * delta_lab);
    const cplx t = raman_transmission(center + 1000.0 * gamma_r, 488.0, omega_cal, delta_lab,
                                      gamma_d1, gamma0);
    CHECK(std::norm(t) > 0.999);
}

TEST_CASE("line-center depth: |T|^2 = exp(-d_R) and depth is linear in OD") {
    const double gamma0 = two_pi * 50.0;
    const double ratio = omega_cal / (2.0 * delta_lab);
    const double gamma_sc = gamma_d1 * ratio * ratio;
    const double gamma_r = gamma0 + gamma_sc;
    const double center = omega_cal * omega_cal / (4.0 * delta_lab);

    const double d488 = -std::log(
        std::norm(raman_transmission(center, 488.0, omega_cal, delta_lab, gamma_d1, gamma0)));
    CHECK(d488 == doctest::Approx(488.0 * gamma_sc / gamma_r).epsilon(1e-12));

    SUBCASE("ratio of depths equals the OD ratio, matching the OBE oracle") {
        const double d63 = -std::log(std::norm(
            raman_transmission(center, 6.3, omega_cal, delta_lab, gamma_d1, gamma0)));
        CHECK(d488 / d63 == doctest::Approx(488.0 / 6.3).epsilon(1e-9));

        // brute-force three-level steady state: depth ratio at ITS line center
        double best488 = 1.0, best63 = 1.0;
        for (double d2 : linspace(center - 6.0 * gamma_r, center + 6.0 * gamma_r, 4001)) {
            best488 = std::min(best488, std::norm(oracles::obe_transmission(
                                            d2, 488.0, omega_cal, delta_lab, gamma_d1,
                                            gamma0)));
            best63 = std::min(best63, std::norm(oracles::obe_transmission(
                                          d2, 6.3, omega_cal, delta_lab, gamma_d1,
                                          gamma0)));
        }
        CHECK(std::log(best488) / std::log(best63) == doctest::Approx(488.0 / 6.3).epsilon(1e-6));
    }

    SUBCASE("depth linearity across two decades") {
        const double base = -std::log(std::norm(
            raman_transmission(center, 5.0, omega_cal, delta_lab, gamma_d1, gamma0)));
        for (double od : {15.0, 50.0, 150.0, 500.0}) {
            const double depth = -std::log(std::norm(
                raman_transmission(center, od, omega_cal, delta_lab, gamma_d1, gamma0)));
            CHECK(depth / base == doctest::Approx(od / 5.0).epsilon(1e-6));
        }
    }
}

TEST_CASE("implementation agrees with the OBE oracle where the conventions meet") {
    const double center = omega_cal * omega_cal / (4.0 * delta_lab);

    SUBCASE("at gamma0 = 0 the line-center depth is exactly the resonant OD in both") {
        for (double od : {3.0, 30.0, 120.0}) {
            const double got = -std::log(std::norm(
                raman_transmission(center, od, omega_cal, delta_lab, gamma_d1, 0.0)));
            CHECK(got == doctest::Approx(od).epsilon(1e-9));
            // OBE depth at its own light-shifted minimum
            double best = 1.0;
            for (double d2 : linspace(0.5 * center, 1.5 * center, 8001)) {
                best = std::min(best, std::norm(oracles::obe_transmission(
                                          d2, od, omega_cal, delta_lab, gamma_d1, 0.0)));
            }
            CHECK(-std::log(best) == doctest::Approx(od).epsilon(1e-3));
        }
    }
    SUBCASE("log-transmission is proportional to OD pointwise in both models") {
        const double gamma0 = two_pi * 300.0;
        for (double d2 : linspace(center - two_pi * 5e3, center + two_pi * 5e3, 11)) {
            const double a_impl = std::log(std::norm(
                raman_transmission(d2, 40.0, omega_cal, delta_lab, gamma_d1, gamma0)));
            const double b_impl = std::log(std::norm(
                raman_transmission(d2, 400.0, omega_cal, delta_lab, gamma_d1, gamma0)));
            CHECK(b_impl / a_impl == doctest::Approx(10.0).epsilon(1e-9));
            const double a_obe = std::log(std::norm(oracles::obe_transmission(
                d2, 40.0, omega_cal, delta_lab, gamma_d1, gamma0)));
            const double b_obe = std::log(std::norm(oracles::obe_transmission(
                d2, 400.0, omega_cal, delta_lab, gamma_d1, gamma0)));
            CHECK(b_obe / a_obe == doctest::Approx(10.0).epsilon(1e-9));
        }
    }
    SUBCASE("both locate the light-shifted line center") {
        const double gamma0 = two_pi * 100.0;
        double best = 1.0, at = 0.0;
        for (double d2 : linspace(0.5 * center, 1.5 * center, 16001)) {
            const double t = std::norm(oracles::obe_transmission(d2, 100.0, omega_cal,
                                                                 delta_lab, gamma_d1, gamma0));
            if (t < best) {
                best = t;
                at = d2;
            }
        }
        CHECK(at == doctest::Approx(center).epsilon(0.01));
    }
}

TEST_CASE("Delta = 0 is rejected") {
    CHECK_THROWS_AS(raman_transmission(0.0, 1.0, 1.0, 0.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("|transmission| never exceeds 1 for passive parameters") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const double od = 1000.0 * u(rng);
        const double omega_c = two_pi * 20e6 * u(rng);
        const double gamma0 = two_pi * 1e4 * u(rng);
        const double d2 = two_pi * 4e6 * (u(rng) - 0.5);
        const cplx t =
            raman_transmission(d2, od, omega_c, delta_lab, gamma_d1, gamma0);
        CHECK(std::abs(t) <= 1.0 + 1e-12);
    }
}

TEST_CASE("manifold spectrum: three ordered dips with the calibrated ODs") {
    const ZeemanManifold m = reference_manifold();
    const auto grid = linspace(-two_pi * 1.5e6, two_pi * 1.5e6, 2001);
    const RamanSpectrum s =
        simulate_manifold_spectrum(m, omega_cal, delta_lab, gamma_d1, two_pi * 100.0, grid);

    // depth ordering mF=+1 >> 0 >> -1: evaluate at the shifted line centers
    const double light_shift = omega_cal * omega_cal / (4.0 * delta_lab);
    std::vector<double> centers = {m.line_center(-1) + light_shift,
                                   m.line_center(0) + light_shift,
                                   m.line_center(1) + light_shift};
    const RamanSpectrum at_centers = simulate_manifold_spectrum(
        m, omega_cal, delta_lab, gamma_d1, two_pi * 100.0, centers);
    double depth[3];
    for (int k = 0; k < 3; ++k)
        depth[k] = -std::log(std::max(at_centers.transmission[static_cast<std::size_t>(k)],
                                      1e-300));
    CHECK(depth[2] > 10.0 * depth[1]);
    CHECK(depth[1] > depth[0]);
    // and the coarse scan still shows three distinct dips
    int dips = 0;
    for (std::size_t i = 1; i + 1 < s.transmission.size(); ++i) {
        if (s.transmission[i] < 0.8 && s.transmission[i] <= s.transmission[i - 1] &&
            s.transmission[i] < s.transmission[i + 1])
            ++dips;
    }
    CHECK(dips >= 3);

    SUBCASE("dip separation equals the Zeeman splitting (grid-search oracle)") {
        // use comparable ODs so all three minima are localizable
        ZeemanManifold equal = m;
        equal.od_per_line = {30.0, 30.0, 30.0};
        const RamanSpectrum se = simulate_manifold_spectrum(equal, omega_cal, delta_lab,
                                                            gamma_d1, two_pi * 100.0, grid);
        std::array<double, 3> minima{};
        for (int mf = -1; mf <= 1; ++mf) {
            const double center = equal.line_center(mf);
            double best = 2.0;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                if (std::abs(grid[i] - center) < two_pi * 0.35e6 &&
                    se.transmission[i] < best) {
                    best = se.transmission[i];
                    minima[static_cast<std::size_t>(mf + 1)] = grid[i];
                }
            }
        }
        const double splitting = equal.zeeman_shift_per_gauss * 0.5;
        const double grid_step = grid[1] - grid[0];
        CHECK(std::abs((minima[1] - minima[0]) - splitting) < 2.0 * grid_step);
        CHECK(std::abs((minima[2] - minima[1]) - splitting) < 2.0 * grid_step);
    }
}

TEST_CASE("all-zero ODs give a flat unit spectrum") {
    ZeemanManifold m;
    m.od_per_line = {0.0, 0.0, 0.0};
    const auto grid = linspace(-two_pi * 1e6, two_pi * 1e6, 101);
    const RamanSpectrum s =
        simulate_manifold_spectrum(m, omega_cal, delta_lab, gamma_d1, 0.0, grid);
    for (double t : s.transmission) CHECK(t == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("light shift moves the fitted line center by Omega_c^2 / 4 Delta") {
    ZeemanManifold m;
    m.od_per_line = {0.0, 40.0, 0.0};
    const auto grid = linspace(-two_pi * 0.4e6, two_pi * 0.4e6, 4001);
    for (double omega_c : {omega_cal, 1.6 * omega_cal}) {
        const RamanSpectrum s = simulate_manifold_spectrum(m, omega_c, delta_lab, gamma_d1,
                                                           two_pi * 200.0, grid);
        double best = 2.0, at = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (s.transmission[i] < best) {
                best = s.transmission[i];
                at = grid[i];
            }
        }
        const double want = omega_c * omega_c / (4.0 * delta_lab);
        CHECK(at == doctest::Approx(want).epsilon(0.02));
    }
}

TEST_CASE("gradient broadened width") {
    CHECK(gradient_broadened_width(0.0, 0.05) == 0.0);
    const double eta = two_pi * 197e3 / 0.05;
    CHECK(gradient_broadened_width(eta, 0.05) == doctest::Approx(197e3).epsilon(1e-12));
    CHECK(gradient_broadened_width(2.0 * eta, 0.05) == doctest::Approx(394e3).epsilon(1e-12));
    CHECK(gradient_broadened_width(-eta, 0.05) == doctest::Approx(197e3).epsilon(1e-12));
}

TEST_CASE("broadened synthesis produces a flat-top line of the expected width") {
    ZeemanManifold m;
    m.od_per_line = {0.0, 0.0, 488.0};
    const double length = 0.05;
    const double eta = two_pi * 197e3 / length;
    const double center = m.line_center(1) + omega_cal * omega_cal / (4.0 * delta_lab);
    const auto grid = linspace(center - two_pi * 0.4e6, center + two_pi * 0.4e6, 1601);
    const RamanSpectrum s = simulate_broadened_spectrum(m, omega_cal, delta_lab, gamma_d1,
                                                        two_pi * 50.0, eta, length, grid);
    // absorbing region should span roughly the broadened width
    double lo = 0.0, hi = 0.0;
    bool found = false;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (s.transmission[i] < 0.5) {
            if (!found) lo = grid[i];
            hi = grid[i];
            found = true;
        }
    }
    REQUIRE(found);
    CHECK((hi - lo) / two_pi == doctest::Approx(197e3).epsilon(0.15));
}

TEST_CASE("fit round trip recovers the generating parameters to 0.1%") {
    const ZeemanManifold m = reference_manifold();
    const auto grid = linspace(-two_pi * 1.2e6, two_pi * 1.2e6, 1201);
    const double gamma0 = two_pi * 150.0;
    const RamanSpectrum s =
        simulate_manifold_spectrum(m, omega_cal, delta_lab, gamma_d1, gamma0, grid);

    SpectrumFitSetup setup;
    setup.manifold_guess = m;
    setup.manifold_guess.od_per_line = {4.0, 30.0, 400.0};
    setup.omega_c_guess = omega_cal * 1.15;
    setup.delta = delta_lab;
    setup.gamma = gamma_d1;
    setup.gamma0 = gamma0;

    const SpectrumFitResult fit = fit_spectrum(s, setup);
    CHECK(fit.converged);
    CHECK(fit.od_per_line[0] == doctest::Approx(6.3).epsilon(1e-3));
    CHECK(fit.od_per_line[1] == doctest::Approx(38.0).epsilon(1e-3));
    CHECK(fit.od_per_line[2] == doctest::Approx(488.0).epsilon(1e-3));
    CHECK(fit.omega_c == doctest::Approx(omega_cal).epsilon(1e-3));
    CHECK(fit.residual_norm < 1e-6);
}

TEST_CASE("property: noiseless round trips over random parameter draws") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto grid = linspace(-two_pi * 1.2e6, two_pi * 1.2e6, 801);
    for (int trial = 0; trial < 8; ++trial) {
        ZeemanManifold m;
        m.od_per_line = {2.0 + 10.0 * u(rng), 20.0 + 40.0 * u(rng), 200.0 + 400.0 * u(rng)};
        const double omega_c = two_pi * (3e6 + 4e6 * u(rng));
        const double gamma0 = two_pi * (50.0 + 300.0 * u(rng));
        const RamanSpectrum s =
            simulate_manifold_spectrum(m, omega_c, delta_lab, gamma_d1, gamma0, grid);

        SpectrumFitSetup setup;
        setup.manifold_guess = m;
        for (double& od : setup.manifold_guess.od_per_line) od *= 0.8;
        setup.omega_c_guess = omega_c * 1.1;
        setup.delta = delta_lab;
        setup.gamma = gamma_d1;
        setup.gamma0 = gamma0;
        const SpectrumFitResult fit = fit_spectrum(s, setup);
        CHECK(fit.converged);
        for (int k = 0; k < 3; ++k)
            CHECK(fit.od_per_line[static_cast<std::size_t>(k)] ==
                  doctest::Approx(m.od_per_line[static_cast<std::size_t>(k)]).epsilon(1e-3));
        CHECK(fit.omega_c == doctest::Approx(omega_c).epsilon(1e-3));
    }
}

TEST_CASE("noisy fit: parameters within 5%, scatter consistent with covariance") {
    const ZeemanManifold m = reference_manifold();
    const auto grid = linspace(-two_pi * 1.2e6, two_pi * 1.2e6, 601);
    const double gamma0 = two_pi * 150.0;
    const RamanSpectrum clean =
        simulate_manifold_spectrum(m, omega_cal, delta_lab, gamma_d1, gamma0, grid);

    std::vector<double> fitted_od;
    std::vector<double> reported_sigma;
    std::mt19937_64 rng(23);
    std::normal_distribution<double> noise(0.0, 0.01);
    for (int seed = 0; seed < 100; ++seed) {
        RamanSpectrum noisy = clean;
        noisy.sigma.assign(noisy.transmission.size(), 0.01);
        for (double& t : noisy.transmission) t += noise(rng);

        SpectrumFitSetup setup;
        setup.manifold_guess = m;
        setup.omega_c_guess = omega_cal;
        setup.delta = delta_lab;
        setup.gamma = gamma_d1;
        setup.gamma0 = gamma0;
        const SpectrumFitResult fit = fit_spectrum(noisy, setup);
        CHECK(fit.od_per_line[2] == doctest::Approx(488.0).epsilon(0.05));
        CHECK(fit.omega_c == doctest::Approx(omega_cal).epsilon(0.05));
        fitted_od.push_back(fit.od_per_line[2]);
        reported_sigma.push_back(fit.od_uncertainty[2]);
    }
    const double scatter = std::sqrt(oracles::variance(fitted_od));
    const double claimed = oracles::mean(reported_sigma);
    CHECK(scatter == doctest::Approx(claimed).epsilon(0.5));
}

TEST_CASE("degenerate spectra are rejected") {
    RamanSpectrum flat;
    for (int i = 0; i < 100; ++i) {
        flat.two_photon_detunings.push_back(static_cast<double>(i));
        flat.transmission.push_back(0.0);
    }
    SpectrumFitSetup setup;
    setup.omega_c_guess = omega_cal;
    CHECK_THROWS_AS(fit_spectrum(flat, setup), std::invalid_argument);

    RamanSpectrum ones = flat;
    for (double& t : ones.transmission) t = 1.0;
    CHECK_THROWS_AS(fit_spectrum(ones, setup), std::invalid_argument);
}
