#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gemlab/constants.hpp"
#include "gemlab/units.hpp"

using gem::two_pi;
using namespace gem::units;

TEST_CASE("quantities parse with canonical scaling") {
    CHECK(parse("6.66 us", Kind::time_s)->value == doctest::Approx(6.66e-6));
    CHECK(parse("325 MHz", Kind::frequency)->value == doctest::Approx(two_pi * 325e6));
    CHECK(parse("5 cm", Kind::length_m)->value == doctest::Approx(0.05));
    CHECK(parse("100 uK", Kind::temperature_k)->value == doctest::Approx(100e-6));
    CHECK(parse("5 deg", Kind::angle_rad)->value == doctest::Approx(5.0 * M_PI / 180.0));
    CHECK(parse("197 kHz/cm", Kind::gradient)->value == doctest::Approx(two_pi * 1.97e7));
    CHECK(parse("0.15 dB/km", Kind::attenuation_db_per_km)->value == doctest::Approx(0.15));
    CHECK(parse("488", Kind::dimensionless)->value == doctest::Approx(488.0));
}

TEST_CASE("unit-less physical quantities are rejected") {
    CHECK(!parse("6.66", Kind::time_s).has_value());
    CHECK(!parse("325", Kind::frequency).has_value());
}

TEST_CASE("wrong-dimension units are rejected") {
    CHECK(!parse("6.66 us", Kind::frequency).has_value());
    CHECK(!parse("5 cm", Kind::time_s).has_value());
    CHECK(!parse("10 bogons", Kind::time_s).has_value());
    CHECK(!parse("garbage", Kind::dimensionless).has_value());
}
