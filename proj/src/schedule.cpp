#include "gemlab/schedule.hpp"

#include <algorithm>
#include <cmath>

namespace gem {

namespace {

void check_windows(const std::vector<TimeWindow>& windows, const char* what) {
    for (std::size_t i = 0; i < windows.size(); ++i) {
        if (!(windows[i].t_end > windows[i].t_start))
            throw std::invalid_argument(std::string(what) + ": window must have t_end > t_start");
        if (i > 0 && windows[i].t_start < windows[i - 1].t_end)
            throw std::invalid_argument(std::string(what) + ": windows overlap or are unsorted");
    }
}

bool inside(const std::vector<TimeWindow>& windows, double t) {
    for (const TimeWindow& w : windows)
        if (t >= w.t_start && t < w.t_end) return true;
    return false;
}

}  // namespace

void ControlField::validate() const {
    if (rabi_frequency < 0.0) throw std::invalid_argument("control: Rabi frequency must be >= 0");
    if (angle_theta < 0.0 || angle_theta >= pi / 2.0)
        throw std::invalid_argument("control: theta must be in [0, pi/2)");
    check_windows(on_windows, "control");
    if (!window_amplitudes.empty() && window_amplitudes.size() != on_windows.size())
        throw std::invalid_argument("control: window amplitude list must match window count");
}

double ControlField::rabi_at(double t) const {
    for (std::size_t i = 0; i < on_windows.size(); ++i) {
        if (t >= on_windows[i].t_start && t < on_windows[i].t_end)
            return window_amplitudes.empty() ? rabi_frequency : window_amplitudes[i];
    }
    return 0.0;
}

void GradientSchedule::validate() const {
    check_windows(off_intervals, "gradient");
}

double GradientSchedule::eta1_at(double t) const {
    if (inside(off_intervals, t)) return 0.0;
    return t < flip_time ? eta1_write : eta1_read;
}

double GradientSchedule::delta_at(double z, double t, double length) const {
    const double zc = z - 0.5 * length;
    const double bias = (t >= flip_time && !std::isnan(delta0_read)) ? delta0_read : delta0;
    return bias + eta1_at(t) * zc + eta2 * zc * zc;
}

void ExperimentSchedule::validate() const {
    control.validate();
    gradient.validate();
    if (!(t_total > 0.0)) throw std::invalid_argument("schedule: t_total must be > 0");
    if (gradient.flip_time < 0.0 || gradient.flip_time > t_total)
        throw std::invalid_argument("schedule: flip_time outside simulation window");
}

ExperimentSchedule build_storage_schedule(double t_write, double t_hold, double t_read,
                                          double eta1_write, double eta1_read,
                                          const ControlField& control, bool hold_fields_off) {
    if (!(t_write > 0.0) || !(t_read > 0.0) || t_hold < 0.0)
        throw std::invalid_argument("storage schedule: durations must be positive (hold >= 0)");
    if (eta1_write * eta1_read >= 0.0)
        throw std::invalid_argument(
            "storage schedule: write and read gradients must have opposite signs (no rephasing "
            "otherwise)");

    ExperimentSchedule schedule;
    schedule.t_total = t_write + t_hold + t_read;

    schedule.gradient.eta1_write = eta1_write;
    schedule.gradient.eta1_read = eta1_read;
    schedule.gradient.flip_time = t_write + t_hold;
    if (hold_fields_off && t_hold > 0.0)
        schedule.gradient.off_intervals = {{t_write, t_write + t_hold}};

    schedule.control = control;
    if (schedule.control.on_windows.empty()) {
        if (hold_fields_off && t_hold > 0.0) {
            schedule.control.on_windows = {{0.0, t_write}, {t_write + t_hold, schedule.t_total}};
        } else {
            schedule.control.on_windows = {{0.0, schedule.t_total}};
        }
    } else if (hold_fields_off && t_hold > 0.0) {
        for (const TimeWindow& w : schedule.control.on_windows) {
            if (w.t_start < t_write + t_hold && w.t_end > t_write)
                throw std::invalid_argument(
                    "storage schedule: control window overlaps the fields-off hold");
        }
    }
    schedule.validate();
    return schedule;
}

}  // namespace gem
