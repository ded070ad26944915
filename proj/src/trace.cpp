#include "gemlab/trace.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gem {

double FieldTrace::energy() const {
    double sum = 0.0;
    for (const cplx& a : amplitudes) sum += std::norm(a);
    return sum * dt;
}

double FieldTrace::energy_in_window(double t1, double t2) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < amplitudes.size(); ++i) {
        const double t = time_at(i);
        if (t >= t1 && t <= t2) sum += std::norm(amplitudes[i]);
    }
    return sum * dt;
}

double gaussian_sigma_from_fwhm(double fwhm) {
    return fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
}

namespace {

std::size_t grid_size(double t0, double t_end, double dt) {
    if (!(dt > 0.0) || !(t_end > t0)) throw std::invalid_argument("pulse grid: need t_end > t0, dt > 0");
    return static_cast<std::size_t>(std::floor((t_end - t0) / dt)) + 1;
}

void add_gaussian(FieldTrace& trace, const GaussianPulseSpec& spec) {
    const double sigma = gaussian_sigma_from_fwhm(spec.fwhm);
    const double denom = 4.0 * sigma * sigma;
    for (std::size_t i = 0; i < trace.amplitudes.size(); ++i) {
        const double t = trace.time_at(i) - spec.center;
        trace.amplitudes[i] += spec.amplitude * std::exp(-t * t / denom);
    }
}

}  // namespace

FieldTrace make_gaussian_pulse(const GaussianPulseSpec& spec, double t0, double t_end, double dt) {
    if (!(spec.fwhm > 0.0)) throw std::invalid_argument("gaussian pulse: fwhm must be > 0");
    FieldTrace trace;
    trace.t0 = t0;
    trace.dt = dt;
    trace.amplitudes.assign(grid_size(t0, t_end, dt), cplx(0.0));
    add_gaussian(trace, spec);
    return trace;
}

PulseTrain make_pulse_train(std::size_t n, double first_center, double spacing, double fwhm,
                            const std::vector<cplx>& amplitudes, double t0, double t_end,
                            double dt) {
    if (n < 1) throw std::invalid_argument("pulse train: need n >= 1");
    if (!(fwhm > 0.0)) throw std::invalid_argument("pulse train: fwhm must be > 0");
    if (n > 1 && !(spacing > 0.0)) throw std::invalid_argument("pulse train: spacing must be > 0");
    if (!amplitudes.empty() && amplitudes.size() != n)
        throw std::invalid_argument("pulse train: amplitude list must be empty or size n");

    PulseTrain train;
    train.trace.t0 = t0;
    train.trace.dt = dt;
    train.trace.amplitudes.assign(grid_size(t0, t_end, dt), cplx(0.0));
    train.overlapping = (n > 1 && spacing < fwhm);
    for (std::size_t k = 0; k < n; ++k) {
        GaussianPulseSpec spec;
        spec.center = first_center + spacing * static_cast<double>(k);
        spec.fwhm = fwhm;
        spec.amplitude = amplitudes.empty() ? cplx(1.0) : amplitudes[k];
        add_gaussian(train.trace, spec);
    }
    return train;
}

double compute_efficiency(const FieldTrace& input, const FieldTrace& output,
                          std::pair<double, double> output_window) {
    if (std::abs(input.dt - output.dt) > 1e-15 * std::max(input.dt, output.dt))
        throw std::invalid_argument("compute_efficiency: traces must share the time step");
    const double e_in = input.energy();
    if (!(e_in > 0.0)) throw std::invalid_argument("compute_efficiency: zero input energy");
    return output.energy_in_window(output_window.first, output_window.second) / e_in;
}

std::pair<double, double> find_recall_window(const FieldTrace& output, double t_start,
                                             double floor_fraction) {
    std::size_t first = output.size();
    double window_max = 0.0;
    for (std::size_t i = 0; i < output.size(); ++i) {
        if (output.time_at(i) < t_start) continue;
        if (first == output.size()) first = i;
        window_max = std::max(window_max, std::norm(output.amplitudes[i]));
    }
    if (first >= output.size() || window_max <= 0.0) return {t_start, t_start};

    // The recalled pulse is an interior local maximum: intensity that only
    // decays from the window edge is leaked input, not an echo.
    std::size_t peak_idx = 0;
    double peak = 0.0;
    for (std::size_t i = std::max<std::size_t>(first, 1); i + 1 < output.size(); ++i) {
        const double h = std::norm(output.amplitudes[i]);
        if (h > peak && h >= std::norm(output.amplitudes[i - 1]) &&
            h > std::norm(output.amplitudes[i + 1]) && h > 1e-6 * window_max) {
            peak = h;
            peak_idx = i;
        }
    }
    if (peak <= 0.0) return {t_start, t_start};

    // end after the last sample above the floor, so a recalled pulse train
    // is not cut at the dips between its pulses
    const double floor = peak * floor_fraction;
    double t_end = output.t_end();
    for (std::size_t i = output.size(); i-- > peak_idx;) {
        if (std::norm(output.amplitudes[i]) >= floor) {
            t_end = output.time_at(std::min(i + 1, output.size() - 1));
            break;
        }
    }
    return {t_start, t_end};
}

namespace {

OverlapResult overlap_at_center(const FieldTrace& out, double norm_out,
                                const GaussianPulseSpec& ref, double center) {
    const double sigma = gaussian_sigma_from_fwhm(ref.fwhm);
    const double denom = 4.0 * sigma * sigma;
    cplx inner(0.0);
    double norm_ref = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double t = out.time_at(i) - center;
        const double g = std::exp(-t * t / denom);
        inner += std::conj(out.amplitudes[i]) * g;
        norm_ref += g * g;
    }
    OverlapResult r;
    r.center = center;
    const double denom2 = std::sqrt(norm_out * norm_ref);
    if (denom2 > 0.0) {
        r.overlap = std::abs(inner) / denom2;
        r.phase = std::arg(inner);
    }
    return r;
}

}  // namespace

OverlapResult mode_overlap_at(const FieldTrace& output, const GaussianPulseSpec& reference,
                              double center) {
    if (!(reference.fwhm > 0.0)) throw std::invalid_argument("mode_overlap: reference fwhm must be > 0");
    double norm_out = 0.0;
    for (const cplx& a : output.amplitudes) norm_out += std::norm(a);
    if (!(norm_out > 0.0)) throw std::invalid_argument("mode_overlap: zero-energy output");
    return overlap_at_center(output, norm_out, reference, center);
}

OverlapResult mode_overlap(const FieldTrace& output, const GaussianPulseSpec& reference) {
    if (!(reference.fwhm > 0.0)) throw std::invalid_argument("mode_overlap: reference fwhm must be > 0");
    double norm_out = 0.0;
    for (const cplx& a : output.amplitudes) norm_out += std::norm(a);
    if (!(norm_out > 0.0)) throw std::invalid_argument("mode_overlap: zero-energy output");

    // Coarse scan on the sample grid, then golden-section refinement around
    // the best center. The overlap is smooth and unimodal near its maximum.
    OverlapResult best;
    const std::size_t stride = std::max<std::size_t>(1, output.size() / 512);
    for (std::size_t i = 0; i < output.size(); i += stride) {
        OverlapResult r = overlap_at_center(output, norm_out, reference, output.time_at(i));
        if (r.overlap > best.overlap) best = r;
    }
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = best.center - output.dt * static_cast<double>(stride);
    double b = best.center + output.dt * static_cast<double>(stride);
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = overlap_at_center(output, norm_out, reference, x1).overlap;
    double f2 = overlap_at_center(output, norm_out, reference, x2).overlap;
    for (int iter = 0; iter < 60 && (b - a) > 1e-6 * reference.fwhm; ++iter) {
        if (f1 < f2) {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + phi * (b - a);
            f2 = overlap_at_center(output, norm_out, reference, x2).overlap;
        } else {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - phi * (b - a);
            f1 = overlap_at_center(output, norm_out, reference, x1).overlap;
        }
    }
    OverlapResult refined = overlap_at_center(output, norm_out, reference, 0.5 * (a + b));
    return refined.overlap > best.overlap ? refined : best;
}

}  // namespace gem
