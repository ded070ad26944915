#pragma once

#include <complex>
#include <vector>

#include "gemlab/constants.hpp"

namespace gem {

// Complex probe envelope sampled on a uniform time grid at a fixed plane.
// Amplitudes are in sqrt(photon flux), so |a|^2 integrated over time is a
// photon number and energy ratios are efficiencies.
struct FieldTrace {
    double t0 = 0.0;                 // time of first sample, s
    double dt = 0.0;                 // uniform step, s
    std::vector<cplx> amplitudes;
    double carrier_detuning = 0.0;   // rad/s relative to two-photon resonance

    std::size_t size() const { return amplitudes.size(); }
    double time_at(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
    double t_end() const { return amplitudes.empty() ? t0 : time_at(amplitudes.size() - 1); }

    // sum |a|^2 dt over the whole trace (or a [t1,t2] window).
    double energy() const;
    double energy_in_window(double t1, double t2) const;
};

// Gaussian pulse described by its intensity FWHM. The amplitude envelope is
// exp(-(t-center)^2 / (4 sigma^2)) with sigma = fwhm / (2 sqrt(2 ln 2)).
struct GaussianPulseSpec {
    double center = 0.0;     // s
    double fwhm = 0.0;       // s, intensity full width at half maximum
    cplx amplitude = 1.0;    // peak amplitude
};

double gaussian_sigma_from_fwhm(double fwhm);

FieldTrace make_gaussian_pulse(const GaussianPulseSpec& spec, double t0, double t_end, double dt);

struct PulseTrain {
    FieldTrace trace;
    bool overlapping = false;  // spacing < fwhm; flagged, not rejected
};

// n Gaussian pulses with uniform spacing between centers; the first is
// centered at `first_center`. `amplitudes` may be empty (all 1) or size n.
PulseTrain make_pulse_train(std::size_t n, double first_center, double spacing, double fwhm,
                            const std::vector<cplx>& amplitudes, double t0, double t_end,
                            double dt);

// Energy ratio of `output` over [window.first, window.second] to the full
// input energy. Throws std::invalid_argument on zero input energy or
// mismatched time steps.
double compute_efficiency(const FieldTrace& input, const FieldTrace& output,
                          std::pair<double, double> output_window);

// Recall window used for efficiency: starts at `t_start` and ends where the
// output intensity falls below `floor_fraction` of its post-start peak.
std::pair<double, double> find_recall_window(const FieldTrace& output, double t_start,
                                             double floor_fraction = 1e-4);

struct OverlapResult {
    double overlap = 0.0;  // in [0, 1]
    double phase = 0.0;    // rad, carrier phase at the optimum
    double center = 0.0;   // s, reference center time at the optimum
};

// Normalized amplitude overlap |<out, ref>| / (|out| |ref|), maximized over
// the reference center time; the phase is arg<out, ref> at the optimum.
OverlapResult mode_overlap(const FieldTrace& output, const GaussianPulseSpec& reference);

// Same overlap evaluated at a fixed reference center (no search).
OverlapResult mode_overlap_at(const FieldTrace& output, const GaussianPulseSpec& reference,
                              double center);

inline double fractional_delay(double storage_time, double fwhm) {
    if (!(fwhm > 0.0)) throw std::invalid_argument("fractional_delay: fwhm must be > 0");
    return storage_time / fwhm;
}

}  // namespace gem
