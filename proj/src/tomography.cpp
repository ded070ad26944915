#include "gemlab/tomography.hpp"

#include <cmath>
#include <stdexcept>

#include "gemlab/rng.hpp"

namespace gem {

void QuadratureEnsemble::validate() const {
    if (x.size() != p.size())
        throw std::invalid_argument("quadrature ensemble: x and p sizes differ");
    if (x.size() < 2) throw std::invalid_argument("quadrature ensemble: need at least 2 samples");
}

std::vector<HeterodyneRecord> synthesize_heterodyne(cplx alpha, double phase_drift_sigma,
                                                    std::size_t n_pulses, std::uint64_t seed,
                                                    const SynthesisSettings& settings) {
    if (n_pulses < 1) throw std::invalid_argument("synthesize_heterodyne: need n_pulses >= 1");

    const int n_samples = settings.samples_per_period * settings.beat_periods;
    const double dt = 1.0 / (settings.beat_frequency * settings.samples_per_period);
    const double noise_sigma = std::sqrt(static_cast<double>(n_samples) / 2.0);

    std::vector<HeterodyneRecord> records;
    records.reserve(n_pulses);
    for (std::size_t shot = 0; shot < n_pulses; ++shot) {
        auto rng = make_rng(seed, "heterodyne-shot", shot);
        std::normal_distribution<double> normal(0.0, 1.0);

        const double drift = phase_drift_sigma > 0.0 ? phase_drift_sigma * normal(rng) : 0.0;
        const double amp = std::sqrt(2.0) * std::abs(alpha);
        const double phase = std::arg(alpha) + drift;

        HeterodyneRecord record;
        record.dt = dt;
        record.beat_frequency = settings.beat_frequency;
        record.reference_phase = settings.reference_phase;
        record.voltage.resize(static_cast<std::size_t>(n_samples));
        for (int k = 0; k < n_samples; ++k) {
            const double t = dt * static_cast<double>(k);
            record.voltage[static_cast<std::size_t>(k)] =
                amp * std::cos(two_pi * settings.beat_frequency * t + phase +
                               settings.reference_phase) +
                noise_sigma * normal(rng);
        }
        records.push_back(std::move(record));
    }
    return records;
}

std::pair<double, double> demodulate(const HeterodyneRecord& record, double f_demod) {
    if (record.voltage.empty() || record.dt <= 0.0)
        throw std::invalid_argument("demodulate: empty record");
    if (record.dt > 1.0 / (10.0 * record.beat_frequency))
        throw std::invalid_argument("demodulate: sample rate below 10x the beat frequency");
    if (std::abs(f_demod - record.beat_frequency) > 0.1 * record.beat_frequency)
        throw std::invalid_argument("demodulate: demodulation frequency more than 10% from beat");
    if (record.duration() < 3.0 / record.beat_frequency)
        throw std::invalid_argument("demodulate: record shorter than 3 beat periods");

    const std::size_t n = record.voltage.size();
    double xc = 0.0, xs = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double arg = two_pi * f_demod * record.dt * static_cast<double>(k) +
                           record.reference_phase;
        xc += record.voltage[k] * std::cos(arg);
        xs += record.voltage[k] * std::sin(arg);
    }
    const double scale = 2.0 / static_cast<double>(n);
    return {xc * scale, -xs * scale};
}

QuadratureEnsemble demodulate_all(const std::vector<HeterodyneRecord>& records, double f_demod) {
    QuadratureEnsemble ensemble;
    ensemble.x.reserve(records.size());
    ensemble.p.reserve(records.size());
    for (const HeterodyneRecord& record : records) {
        const auto [x, p] = demodulate(record, f_demod);
        ensemble.x.push_back(x);
        ensemble.p.push_back(p);
    }
    return ensemble;
}

QEstimate estimate_q(const QuadratureEnsemble& ensemble, std::optional<QGridSpec> grid) {
    ensemble.validate();
    const std::size_t m = ensemble.size();

    QEstimate out;
    out.state.kind = StateDomain::q;
    out.state.sample_count = m;

    double mx = 0.0, mp = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        mx += ensemble.x[i];
        mp += ensemble.p[i];
    }
    mx /= static_cast<double>(m);
    mp /= static_cast<double>(m);
    double sxx = 0.0, spp = 0.0, sxp = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double dx = ensemble.x[i] - mx;
        const double dp = ensemble.p[i] - mp;
        sxx += dx * dx;
        spp += dp * dp;
        sxp += dx * dp;
    }
    const double denom = static_cast<double>(m) - 1.0;
    out.state.mean << mx, mp;
    out.state.covariance << sxx / denom, sxp / denom, sxp / denom, spp / denom;

    if (grid.has_value()) {
        if (m < 100)
            throw std::invalid_argument("estimate_q: surface output needs at least 100 samples");
        QSurface surface;
        surface.grid = *grid;
        const int bins = grid->bins;
        surface.values.assign(static_cast<std::size_t>(bins) * static_cast<std::size_t>(bins), 0.0);
        const double cell = surface.cell();
        std::size_t counted = 0;
        for (std::size_t i = 0; i < m; ++i) {
            const int ix = static_cast<int>(std::floor((ensemble.x[i] + grid->half_range) / cell));
            const int ip = static_cast<int>(std::floor((ensemble.p[i] + grid->half_range) / cell));
            if (ix < 0 || ix >= bins || ip < 0 || ip >= bins) continue;
            surface.values[static_cast<std::size_t>(ip) * static_cast<std::size_t>(bins) +
                           static_cast<std::size_t>(ix)] += 1.0;
            ++counted;
        }
        if (counted > 0) {
            const double norm = 1.0 / (static_cast<double>(counted) * cell * cell);
            for (double& v : surface.values) v *= norm;
        }
        out.surface = std::move(surface);
    }
    return out;
}

GaussianStateEstimate q_to_wigner(const GaussianStateEstimate& q_estimate) {
    if (q_estimate.kind != StateDomain::q)
        throw std::invalid_argument("q_to_wigner: estimate is not Q-domain");

    GaussianStateEstimate w = q_estimate;
    w.kind = StateDomain::wigner;
    w.covariance = q_estimate.covariance - 0.5 * Eigen::Matrix2d::Identity();

    const double tol =
        q_estimate.sample_count > 0
            ? 5.0 * std::sqrt(2.0 / static_cast<double>(q_estimate.sample_count))
            : 1e-9;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eigensolver(w.covariance);
    const double min_eig = eigensolver.eigenvalues().minCoeff();
    if (min_eig <= 0.0)
        throw UnphysicalDeconvolutionError(
            "q_to_wigner: deconvolved covariance not positive definite (eigenvalue " +
                std::to_string(min_eig) + ")",
            min_eig);
    const double det = w.covariance.determinant();
    if (det < 0.25 * (1.0 - tol))
        throw UnphysicalDeconvolutionError(
            "q_to_wigner: det below the Heisenberg bound 1/4 (smallest eigenvalue " +
                std::to_string(min_eig) + ", det " + std::to_string(det) + ")",
            min_eig);
    // within the statistical slack, project back onto the physical set
    if (det < 0.25) w.covariance *= std::sqrt(0.25 / det);
    return w;
}

QSurface render_gaussian_surface(const GaussianStateEstimate& estimate, QGridSpec grid) {
    QSurface surface;
    surface.grid = grid;
    const int bins = grid.bins;
    surface.values.assign(static_cast<std::size_t>(bins) * static_cast<std::size_t>(bins), 0.0);
    const double cell = surface.cell();
    const Eigen::Matrix2d inv = estimate.covariance.inverse();
    const double norm = 1.0 / (two_pi * std::sqrt(estimate.covariance.determinant()));
    for (int ip = 0; ip < bins; ++ip) {
        for (int ix = 0; ix < bins; ++ix) {
            Eigen::Vector2d r(-grid.half_range + cell * (0.5 + ix),
                              -grid.half_range + cell * (0.5 + ip));
            r -= estimate.mean;
            surface.values[static_cast<std::size_t>(ip) * static_cast<std::size_t>(bins) +
                           static_cast<std::size_t>(ix)] =
                norm * std::exp(-0.5 * r.dot(inv * r));
        }
    }
    return surface;
}

double gaussian_fidelity(const GaussianStateEstimate& a, const GaussianStateEstimate& b) {
    if (a.kind != StateDomain::wigner || b.kind != StateDomain::wigner)
        throw std::invalid_argument("gaussian_fidelity: both states must be Wigner-domain");
    for (const GaussianStateEstimate* s : {&a, &b}) {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(s->covariance);
        if (es.eigenvalues().minCoeff() <= 0.0)
            throw std::invalid_argument("gaussian_fidelity: unphysical covariance");
        if (s->covariance.determinant() < 0.25 * (1.0 - 1e-6))
            throw std::invalid_argument("gaussian_fidelity: covariance below the Heisenberg bound");
    }

    // Single-mode closed form in doubled covariances (vacuum -> identity).
    const Eigen::Matrix2d va = 2.0 * a.covariance;
    const Eigen::Matrix2d vb = 2.0 * b.covariance;
    const Eigen::Matrix2d sum = va + vb;
    const double delta_det = sum.determinant();
    const double lambda = std::max(0.0, (va.determinant() - 1.0) * (vb.determinant() - 1.0));
    const Eigen::Vector2d d = a.mean - b.mean;
    const double exponent = -d.dot(sum.inverse() * d);
    const double fidelity =
        2.0 * std::exp(exponent) / (std::sqrt(delta_det + lambda) - std::sqrt(lambda));
    return std::min(1.0, fidelity);
}

PhotonNumberEstimate mean_photon_number(const QuadratureEnsemble& ensemble) {
    ensemble.validate();
    const std::size_t m = ensemble.size();
    std::vector<double> s(m);
    double mean = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        s[i] = 0.5 * (ensemble.x[i] * ensemble.x[i] + ensemble.p[i] * ensemble.p[i]);
        mean += s[i];
    }
    mean /= static_cast<double>(m);

    double ss = 0.0;
    for (std::size_t i = 0; i < m; ++i) ss += (s[i] - mean) * (s[i] - mean);

    PhotonNumberEstimate est;
    est.n_bar = mean - 1.0;
    est.sigma = std::sqrt(ss / (static_cast<double>(m) * (static_cast<double>(m) - 1.0)));
    return est;
}

QuadratureEnsemble sample_coherent_ensemble(cplx alpha, std::size_t m, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    QuadratureEnsemble ensemble;
    ensemble.x.resize(m);
    ensemble.p.resize(m);
    const double mx = std::sqrt(2.0) * alpha.real();
    const double mp = std::sqrt(2.0) * alpha.imag();
    for (std::size_t i = 0; i < m; ++i) {
        ensemble.x[i] = mx + normal(rng);
        ensemble.p[i] = mp + normal(rng);
    }
    return ensemble;
}

QuadratureEnsemble sample_loss_channel_output(cplx alpha, double eta, std::size_t m,
                                              std::mt19937_64& rng) {
    if (eta < 0.0 || eta > 1.0)
        throw std::invalid_argument("loss channel: eta must be in [0, 1]");
    return sample_coherent_ensemble(std::sqrt(eta) * alpha, m, rng);
}

QuadratureEnsemble sample_classical_channel_output(cplx alpha, double gain, std::size_t m,
                                                   std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    QuadratureEnsemble ensemble;
    ensemble.x.resize(m);
    ensemble.p.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        // heterodyne measurement of alpha: one added vacuum unit
        const double meas_x = std::sqrt(2.0) * alpha.real() + normal(rng);
        const double meas_p = std::sqrt(2.0) * alpha.imag() + normal(rng);
        // re-prepared coherent state at gain g: one more vacuum unit
        ensemble.x[i] = gain * meas_x + normal(rng);
        ensemble.p[i] = gain * meas_p + normal(rng);
    }
    return ensemble;
}

}  // namespace gem
