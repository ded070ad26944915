#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gemlab/trace.hpp"
#include "oracles.hpp"

using namespace gem;

namespace {

FieldTrace single_pulse(double fwhm, double center, double t_end, double amp = 1.0) {
    GaussianPulseSpec spec;
    spec.fwhm = fwhm;
    spec.center = center;
    spec.amplitude = amp;
    return make_gaussian_pulse(spec, 0.0, t_end, fwhm / 200.0);
}

}  // namespace

TEST_CASE("single-pulse energy matches the analytic value") {
    // integral of exp(-t^2 / 2 sigma^2) = sigma sqrt(2 pi)
    const double fwhm = 6.66e-6;
    const double sigma = gaussian_sigma_from_fwhm(fwhm);
    const FieldTrace trace = single_pulse(fwhm, 60e-6, 120e-6);
    CHECK(trace.energy() == doctest::Approx(sigma * std::sqrt(2.0 * M_PI)).epsilon(1e-9));
}

TEST_CASE("compute_efficiency basics") {
    const FieldTrace in = single_pulse(6.66e-6, 40e-6, 200e-6);

    SUBCASE("output identical to input gives 1") {
        CHECK(compute_efficiency(in, in, {0.0, 200e-6}) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("scaled delayed copy gives the square of the scale") {
        FieldTrace out = single_pulse(6.66e-6, 120e-6, 200e-6, std::sqrt(0.87));
        CHECK(compute_efficiency(in, out, {60e-6, 200e-6}) ==
              doctest::Approx(0.87).epsilon(1e-6));
    }
    SUBCASE("zero input energy is an error") {
        FieldTrace zero = in;
        for (auto& a : zero.amplitudes) a = 0.0;
        CHECK_THROWS_AS(compute_efficiency(zero, in, {0.0, 200e-6}), std::invalid_argument);
    }
    SUBCASE("mismatched steps are an error") {
        FieldTrace other = in;
        other.dt *= 2.0;
        CHECK_THROWS_AS(compute_efficiency(in, other, {0.0, 200e-6}), std::invalid_argument);
    }
}

TEST_CASE("pulse train energy additivity") {
    const double fwhm = 5e-6;
    const FieldTrace one = single_pulse(fwhm, 100e-6, 400e-6);
    const PulseTrain three =
        make_pulse_train(3, 100e-6, 10.0 * fwhm, fwhm, {}, 0.0, 400e-6, fwhm / 200.0);
    CHECK(!three.overlapping);
    CHECK(three.trace.energy() == doctest::Approx(3.0 * one.energy()).epsilon(1e-9));
}

TEST_CASE("n=1 train equals the single-pulse constructor") {
    const double fwhm = 5e-6;
    const FieldTrace one = single_pulse(fwhm, 50e-6, 200e-6);
    const PulseTrain train = make_pulse_train(1, 50e-6, 0.0, fwhm, {}, 0.0, 200e-6, fwhm / 200.0);
    REQUIRE(train.trace.size() == one.size());
    for (std::size_t i = 0; i < one.size(); ++i)
        CHECK(std::abs(train.trace.amplitudes[i] - one.amplitudes[i]) < 1e-15);
}

TEST_CASE("overlapping trains are flagged, not rejected") {
    const PulseTrain train = make_pulse_train(4, 20e-6, 3e-6, 5e-6, {}, 0.0, 100e-6, 25e-9);
    CHECK(train.overlapping);
}

TEST_CASE("20-pulse train has 20 resolvable peaks") {
    const PulseTrain train = make_pulse_train(20, 20e-6, 10e-6, 5e-6, {}, 0.0, 250e-6, 25e-9);
    int peaks = 0;
    const auto& a = train.trace.amplitudes;
    for (std::size_t i = 1; i + 1 < a.size(); ++i) {
        if (std::norm(a[i]) > 0.25 && std::norm(a[i]) >= std::norm(a[i - 1]) &&
            std::norm(a[i]) > std::norm(a[i + 1]))
            ++peaks;
    }
    CHECK(peaks == 20);
}

TEST_CASE("mode_overlap basics") {
    const double fwhm = 6.66e-6;
    const FieldTrace out = single_pulse(fwhm, 60e-6, 140e-6);
    GaussianPulseSpec ref;
    ref.fwhm = fwhm;
    ref.center = 30e-6;  // overlap search must find the true center

    SUBCASE("identical shape gives overlap 1, phase 0") {
        const OverlapResult r = mode_overlap(out, ref);
        CHECK(r.overlap == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(std::abs(r.phase) < 1e-9);
        CHECK(r.center == doctest::Approx(60e-6).epsilon(1e-6));
    }
    SUBCASE("carrier phase is recovered") {
        FieldTrace rotated = out;
        for (auto& a : rotated.amplitudes) a *= std::polar(1.0, 0.7);
        const OverlapResult r = mode_overlap(rotated, ref);
        CHECK(r.overlap == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(r.phase == doctest::Approx(-0.7).epsilon(1e-6));
    }
    SUBCASE("fixed-shift overlap matches the closed-form Gaussian integral") {
        // same sigma, center offset by one FWHM: exp(-FWHM^2 / 8 sigma^2) = 1/2
        const double sigma = gaussian_sigma_from_fwhm(fwhm);
        const OverlapResult r = mode_overlap_at(out, ref, 60e-6 + fwhm);
        const double want = oracles::gaussian_overlap(sigma, sigma, fwhm);
        CHECK(r.overlap == doctest::Approx(want).epsilon(1e-6));
        CHECK(want == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("zero-energy output is an error") {
        FieldTrace zero = out;
        for (auto& a : zero.amplitudes) a = 0.0;
        CHECK_THROWS_AS(mode_overlap(zero, ref), std::invalid_argument);
    }
}

TEST_CASE("fractional delay") {
    CHECK(fractional_delay(0.0, 1e-6) == 0.0);
    CHECK(fractional_delay(54e-6, 6.66e-6) == doctest::Approx(8.1).epsilon(1e-2));
    CHECK(fractional_delay(0.56e-3, 6.66e-6) == doctest::Approx(84.0).epsilon(1e-2));
    CHECK_THROWS_AS(fractional_delay(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("recall window ends at the 1e-4 intensity floor") {
    FieldTrace out = single_pulse(6.66e-6, 60e-6, 200e-6);
    const auto [t1, t2] = find_recall_window(out, 20e-6);
    CHECK(t1 == 20e-6);
    // |a|^2 = 1e-4 of peak at t - center = sqrt(ln(1e4) * 2) sigma
    const double sigma = gaussian_sigma_from_fwhm(6.66e-6);
    const double want = 60e-6 + std::sqrt(2.0 * std::log(1e4)) * sigma;
    CHECK(t2 == doctest::Approx(want).epsilon(1e-3));
}
