#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gemlab/constants.hpp"
#include "gemlab/schedule.hpp"

using namespace gem;

namespace {

ControlField basic_control(double rabi = two_pi * 5.19e6) {
    ControlField c;
    c.rabi_frequency = rabi;
    return c;
}

}  // namespace

TEST_CASE("minimal schedule: symmetric write/read, single flip") {
    const double eta = two_pi * 197e3 / 0.05;
    const ExperimentSchedule s =
        build_storage_schedule(20e-6, 0.0, 30e-6, eta, -eta, basic_control(), false);
    CHECK(s.gradient.flip_time == doctest::Approx(20e-6));
    CHECK(s.t_total == doctest::Approx(50e-6));
    CHECK(s.gradient.eta1_at(10e-6) == doctest::Approx(eta));
    CHECK(s.gradient.eta1_at(25e-6) == doctest::Approx(-eta));
    CHECK(s.control.rabi_at(25e-6) == doctest::Approx(two_pi * 5.19e6));
}

TEST_CASE("fields-off hold zeroes both control and gradient exactly") {
    const double eta = two_pi * 197e3 / 0.05;
    const ExperimentSchedule s =
        build_storage_schedule(20e-6, 100e-6, 30e-6, eta, -eta, basic_control(), true);
    for (double t : {21e-6, 60e-6, 119e-6}) {
        CHECK(s.gradient.eta1_at(t) == 0.0);
        CHECK(s.control.rabi_at(t) == 0.0);
    }
    CHECK(s.gradient.eta1_at(10e-6) == doctest::Approx(eta));
    CHECK(s.gradient.eta1_at(125e-6) == doctest::Approx(-eta));
    CHECK(s.control.rabi_at(125e-6) > 0.0);
}

TEST_CASE("measured broadened widths map to eta1 over 5 cm") {
    const double length = 0.05;
    const double eta_write = two_pi * 197e3 / length;
    const double eta_read = -two_pi * 210e3 / length;
    const ExperimentSchedule s =
        build_storage_schedule(16e-6, 0.0, 44e-6, eta_write, eta_read, basic_control(), false);
    CHECK(std::abs(s.gradient.eta1_write) * length == doctest::Approx(two_pi * 197e3));
    CHECK(std::abs(s.gradient.eta1_read) * length == doctest::Approx(two_pi * 210e3));
}

TEST_CASE("same-sign gradients are rejected") {
    CHECK_THROWS_AS(build_storage_schedule(1e-6, 0.0, 1e-6, 1.0, 1.0, basic_control(), false),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_storage_schedule(1e-6, 0.0, 1e-6, -1.0, -1.0, basic_control(), false),
                    std::invalid_argument);
}

TEST_CASE("overlapping control windows are rejected") {
    ControlField c = basic_control();
    c.on_windows = {{0.0, 10e-6}, {5e-6, 20e-6}};
    CHECK_THROWS_AS(build_storage_schedule(10e-6, 0.0, 10e-6, 1.0, -1.0, c, false),
                    std::invalid_argument);
}

TEST_CASE("control window overlapping a fields-off hold is rejected") {
    ControlField c = basic_control();
    c.on_windows = {{0.0, 30e-6}};  // extends into the hold
    CHECK_THROWS_AS(build_storage_schedule(20e-6, 50e-6, 20e-6, 1.0, -1.0, c, true),
                    std::invalid_argument);
}

TEST_CASE("gradient profile is linear-plus-quadratic around the center") {
    GradientSchedule g;
    g.delta0 = 100.0;
    g.eta1_write = 50.0;
    g.eta1_read = -50.0;
    g.eta2 = 7.0;
    g.flip_time = 1.0;
    const double length = 2.0;
    // center: only the offset
    CHECK(g.delta_at(1.0, 0.5, length) == doctest::Approx(100.0));
    // the flip mirrors the linear term, not the quadratic one
    const double before = g.delta_at(1.5, 0.5, length);
    const double after = g.delta_at(1.5, 1.5, length);
    CHECK(before == doctest::Approx(100.0 + 50.0 * 0.5 + 7.0 * 0.25));
    CHECK(after == doctest::Approx(100.0 - 50.0 * 0.5 + 7.0 * 0.25));
}

TEST_CASE("theta outside [0, pi/2) is rejected") {
    ControlField c = basic_control();
    c.angle_theta = 2.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}
