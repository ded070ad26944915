#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "gemlab/constants.hpp"

namespace gem {

struct TimeWindow {
    double t_start = 0.0;
    double t_end = 0.0;
};

// Control field: Rabi frequency applied inside non-overlapping, sorted
// windows (zero outside). A window may override the base amplitude.
struct ControlField {
    double rabi_frequency = 0.0;  // rad/s, base value inside windows
    double angle_theta = 0.0;     // rad, between control and probe k-vectors
    std::vector<TimeWindow> on_windows;
    std::vector<double> window_amplitudes;  // optional, per-window rad/s

    void validate() const;
    double rabi_at(double t) const;
};

// Two-photon detuning profile delta(z,t) = delta0 + eta1(t) z' + eta2 z'^2
// with z' measured from the medium center. eta1 starts at eta1_write, flips
// sign at flip_time, and is zero inside off_intervals; eta2 never flips.
// The bias may take a different value during the read phase: that is the
// recall-side tuning used to cancel frequency pulling of the echo.
struct GradientSchedule {
    double delta0 = 0.0;       // rad/s
    double delta0_read = std::numeric_limits<double>::quiet_NaN();  // NaN: same as delta0
    double eta1_write = 0.0;   // rad/s/m
    double eta1_read = 0.0;    // rad/s/m (opposite sign)
    double eta2 = 0.0;         // rad/s/m^2
    double flip_time = 0.0;    // s
    std::vector<TimeWindow> off_intervals;

    void validate() const;
    double eta1_at(double t) const;
    // z measured from the input face; the linear term is centered on the
    // medium so the flip mirrors detunings about delta0.
    double delta_at(double z, double t, double length) const;
};

struct ExperimentSchedule {
    ControlField control;
    GradientSchedule gradient;
    double t_total = 0.0;  // s

    void validate() const;
};

// Write/hold/read storage schedule. The gradient is eta1_write until
// t_write + t_hold and eta1_read afterwards; with hold_fields_off both the
// control field and the linear gradient are exactly zero during the hold.
ExperimentSchedule build_storage_schedule(double t_write, double t_hold, double t_read,
                                          double eta1_write, double eta1_read,
                                          const ControlField& control, bool hold_fields_off);

}  // namespace gem
