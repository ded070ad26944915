#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "gemlab/constants.hpp"

namespace gem {

// Units convention, fixed project-wide: vacuum quadrature variance is 1/2;
// heterodyne detection adds one extra vacuum unit, so demodulated samples of
// vacuum have variance 1 per axis and a coherent state alpha appears at
// (sqrt(2) Re alpha, sqrt(2) Im alpha). The mean photon number of an
// ensemble is mean((x^2 + p^2)/2) - 1.

struct HeterodyneRecord {
    double dt = 0.0;               // s, uniform sampling
    std::vector<double> voltage;   // shot-noise-limited photocurrent
    double beat_frequency = 0.0;   // Hz
    double reference_phase = 0.0;  // rad

    double duration() const { return dt * static_cast<double>(voltage.size()); }
};

struct QuadratureEnsemble {
    std::vector<double> x;
    std::vector<double> p;

    std::size_t size() const { return x.size(); }
    void validate() const;
};

enum class StateDomain { q, wigner };

struct GaussianStateEstimate {
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    Eigen::Matrix2d covariance = Eigen::Matrix2d::Identity();
    StateDomain kind = StateDomain::q;
    std::size_t sample_count = 0;  // 0 means exact (no statistical slack)
};

struct SynthesisSettings {
    double beat_frequency = 3.0e6;  // Hz, detection band center
    int samples_per_period = 16;
    int beat_periods = 6;
    double reference_phase = 0.0;
};

// Simulated heterodyne records of a coherent pulse train: a beat-frequency
// sinusoid set by alpha, a per-shot Gaussian phase offset, and white noise
// calibrated so that vacuum demodulates to unit variance per quadrature.
// Deterministic for a given seed.
std::vector<HeterodyneRecord> synthesize_heterodyne(cplx alpha, double phase_drift_sigma,
                                                    std::size_t n_pulses, std::uint64_t seed,
                                                    const SynthesisSettings& settings = {});

// Lock-in products against cosine/sine at f_demod, referenced to the
// record's reference phase. f_demod must sit within 10% of the beat and the
// record must span at least 3 beat periods.
std::pair<double, double> demodulate(const HeterodyneRecord& record, double f_demod);

QuadratureEnsemble demodulate_all(const std::vector<HeterodyneRecord>& records, double f_demod);

struct QGridSpec {
    double half_range = 6.0;  // grid covers [-half_range, half_range] per axis
    int bins = 61;
};

struct QSurface {
    QGridSpec grid;
    std::vector<double> values;  // row-major over (p, x), normalized to unit integral

    double cell() const { return 2.0 * grid.half_range / grid.bins; }
};

struct QEstimate {
    GaussianStateEstimate state;  // kind = q
    std::optional<QSurface> surface;
};

// Sample mean/covariance of the ensemble, plus a kernel-free histogram of
// the Husimi Q function when the ensemble is large enough (m >= 100).
QEstimate estimate_q(const QuadratureEnsemble& ensemble, std::optional<QGridSpec> grid = {});

class UnphysicalDeconvolutionError : public std::runtime_error {
  public:
    UnphysicalDeconvolutionError(const std::string& msg, double eigenvalue)
        : std::runtime_error(msg), offending_eigenvalue(eigenvalue) {}
    double offending_eigenvalue;
};

// Gaussian-moment deconvolution of the vacuum: mean unchanged, covariance
// reduced by I/2. Throws UnphysicalDeconvolutionError when the result is not
// positive definite or violates det >= 1/4 beyond the statistical slack
// implied by sample_count; inside the slack the covariance is projected back
// onto the physical set, so returned states always satisfy the bound.
GaussianStateEstimate q_to_wigner(const GaussianStateEstimate& q_estimate);

// Wigner surface of a Gaussian estimate, rendered from the fitted moments.
QSurface render_gaussian_surface(const GaussianStateEstimate& estimate, QGridSpec grid);

// Uhlmann fidelity for single-mode Gaussian states (both Wigner-domain).
double gaussian_fidelity(const GaussianStateEstimate& a, const GaussianStateEstimate& b);

struct PhotonNumberEstimate {
    double n_bar = 0.0;
    double sigma = 0.0;  // jackknife
};

PhotonNumberEstimate mean_photon_number(const QuadratureEnsemble& ensemble);

// Direct Q-domain sampling helpers (channel oracles and the tv pipeline).
QuadratureEnsemble sample_coherent_ensemble(cplx alpha, std::size_t m, std::mt19937_64& rng);

// Pure-loss channel applied to a coherent input: output is the attenuated
// coherent state, still with unit Q variance.
QuadratureEnsemble sample_loss_channel_output(cplx alpha, double eta, std::size_t m,
                                              std::mt19937_64& rng);

// Measure-and-recreate channel at gain g: one vacuum unit from the dual
// quadrature measurement, one from re-preparation.
QuadratureEnsemble sample_classical_channel_output(cplx alpha, double gain, std::size_t m,
                                                   std::mt19937_64& rng);

}  // namespace gem
