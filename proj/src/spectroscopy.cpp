#include "gemlab/spectroscopy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gemlab/levmar.hpp"

namespace gem {

void ZeemanManifold::validate() const {
    for (double od : od_per_line)
        if (!(od >= 0.0)) throw std::invalid_argument("manifold: ODs must be >= 0");
    if (!(zeeman_shift_per_gauss > 0.0))
        throw std::invalid_argument("manifold: zeeman shift must be > 0");
}

double ZeemanManifold::line_center(int m_f) const {
    return static_cast<double>(m_f) * zeeman_shift_per_gauss * bias_field_tesla * 1e4;
}

void RamanSpectrum::validate() const {
    if (two_photon_detunings.size() != transmission.size())
        throw std::invalid_argument("spectrum: grid/transmission size mismatch");
    for (std::size_t i = 1; i < two_photon_detunings.size(); ++i)
        if (!(two_photon_detunings[i] > two_photon_detunings[i - 1]))
            throw std::invalid_argument("spectrum: detuning grid must be strictly increasing");
    if (!phase.empty() && phase.size() != transmission.size())
        throw std::invalid_argument("spectrum: phase column size mismatch");
    if (!sigma.empty() && sigma.size() != transmission.size())
        throw std::invalid_argument("spectrum: sigma column size mismatch");
}

namespace {

struct RamanLine {
    double d_r = 0.0;      // line-center depth
    double gamma_r = 0.0;  // HWHM, rad/s
    double center = 0.0;   // light-shifted center, rad/s
};

RamanLine line_parameters(double od, double omega_c, double delta, double gamma, double gamma0) {
    RamanLine line;
    const double ratio = omega_c / (2.0 * delta);
    const double gamma_sc = gamma * ratio * ratio;
    line.gamma_r = gamma0 + gamma_sc;
    line.d_r = line.gamma_r > 0.0 ? od * gamma_sc / line.gamma_r : 0.0;
    line.center = omega_c * omega_c / (4.0 * delta);
    return line;
}

// log of the complex amplitude transmission of one line
cplx log_transmission(const RamanLine& line, double delta2) {
    if (line.d_r <= 0.0 || line.gamma_r <= 0.0) return cplx(0.0);
    return -0.5 * line.d_r * line.gamma_r / cplx(line.gamma_r, delta2 - line.center);
}

}  // namespace

cplx raman_transmission(double delta2, double od, double omega_c, double delta, double gamma,
                        double gamma0) {
    if (delta == 0.0) throw std::invalid_argument("raman_transmission: Delta must be nonzero");
    if (od < 0.0 || omega_c < 0.0 || gamma < 0.0 || gamma0 < 0.0)
        throw std::invalid_argument("raman_transmission: passive parameters must be >= 0");
    return std::exp(log_transmission(line_parameters(od, omega_c, delta, gamma, gamma0), delta2));
}

RamanSpectrum simulate_manifold_spectrum(const ZeemanManifold& manifold, double omega_c,
                                         double delta, double gamma, double gamma0,
                                         const std::vector<double>& detuning_grid) {
    manifold.validate();
    if (delta == 0.0) throw std::invalid_argument("manifold spectrum: Delta must be nonzero");

    std::array<RamanLine, 3> lines;
    for (int m = -1; m <= 1; ++m) {
        lines[static_cast<std::size_t>(m + 1)] =
            line_parameters(manifold.od_per_line[static_cast<std::size_t>(m + 1)], omega_c, delta,
                            gamma, gamma0);
        lines[static_cast<std::size_t>(m + 1)].center += manifold.line_center(m);
    }

    RamanSpectrum spectrum;
    spectrum.two_photon_detunings = detuning_grid;
    spectrum.transmission.reserve(detuning_grid.size());
    spectrum.phase.reserve(detuning_grid.size());
    for (double d2 : detuning_grid) {
        cplx log_t(0.0);
        for (const RamanLine& line : lines) log_t += log_transmission(line, d2);
        const cplx t = std::exp(log_t);
        spectrum.transmission.push_back(std::norm(t));
        spectrum.phase.push_back(std::arg(t));
    }
    spectrum.validate();
    return spectrum;
}

RamanSpectrum simulate_broadened_spectrum(const ZeemanManifold& manifold, double omega_c,
                                          double delta, double gamma, double gamma0, double eta1,
                                          double length, const std::vector<double>& detuning_grid) {
    manifold.validate();
    if (delta == 0.0) throw std::invalid_argument("broadened spectrum: Delta must be nonzero");
    if (!(length > 0.0)) throw std::invalid_argument("broadened spectrum: length must be > 0");

    std::array<RamanLine, 3> lines;
    for (int m = -1; m <= 1; ++m) {
        lines[static_cast<std::size_t>(m + 1)] =
            line_parameters(manifold.od_per_line[static_cast<std::size_t>(m + 1)], omega_c, delta,
                            gamma, gamma0);
        lines[static_cast<std::size_t>(m + 1)].center += manifold.line_center(m);
    }

    // Trapezoid over z; each slab contributes od dz/L at local detuning
    // offset eta1 (z - L/2).
    const int nz = 257;
    const double dz = length / static_cast<double>(nz - 1);

    RamanSpectrum spectrum;
    spectrum.two_photon_detunings = detuning_grid;
    spectrum.transmission.reserve(detuning_grid.size());
    spectrum.phase.reserve(detuning_grid.size());
    for (double d2 : detuning_grid) {
        cplx log_t(0.0);
        for (int iz = 0; iz < nz; ++iz) {
            const double z = dz * static_cast<double>(iz);
            const double local = eta1 * (z - 0.5 * length);
            const double weight = (iz == 0 || iz == nz - 1) ? 0.5 : 1.0;
            for (const RamanLine& line : lines)
                log_t += weight * log_transmission(line, d2 - local) / static_cast<double>(nz - 1);
        }
        const cplx t = std::exp(log_t);
        spectrum.transmission.push_back(std::norm(t));
        spectrum.phase.push_back(std::arg(t));
    }
    spectrum.validate();
    return spectrum;
}

SpectrumFitResult fit_spectrum(const RamanSpectrum& measured, const SpectrumFitSetup& setup) {
    measured.validate();
    if (measured.transmission.size() < 5)
        throw std::invalid_argument("fit_spectrum: need at least 5 points");

    const auto [min_it, max_it] =
        std::minmax_element(measured.transmission.begin(), measured.transmission.end());
    if (*max_it - *min_it < 1e-6)
        throw std::invalid_argument("fit_spectrum: degenerate flat data, no resolvable dip");

    FitData data;
    data.x = measured.two_photon_detunings;
    data.y = measured.transmission;
    data.sigma = measured.sigma;

    const ZeemanManifold& base = setup.manifold_guess;
    const ModelFn model = [&](double d2, const Eigen::VectorXd& p) {
        ZeemanManifold m = base;
        m.od_per_line = {std::abs(p(0)), std::abs(p(1)), std::abs(p(2))};
        const double omega_c = std::abs(p(3));
        cplx log_t(0.0);
        for (int mf = -1; mf <= 1; ++mf) {
            RamanLine line = line_parameters(m.od_per_line[static_cast<std::size_t>(mf + 1)],
                                             omega_c, setup.delta, setup.gamma, setup.gamma0);
            line.center += m.line_center(mf);
            log_t += log_transmission(line, d2);
        }
        return std::norm(std::exp(log_t));
    };

    Eigen::VectorXd guess(4);
    guess << base.od_per_line[0], base.od_per_line[1], base.od_per_line[2], setup.omega_c_guess;

    FitOptions options;
    options.param_names = {"od(mF=-1)", "od(mF=0)", "od(mF=+1)", "omega_c"};
    const FitResult fit = levmar_fit(model, data, guess, options);

    SpectrumFitResult result;
    for (int k = 0; k < 3; ++k) {
        result.od_per_line[static_cast<std::size_t>(k)] = std::abs(fit.params(k));
        result.od_uncertainty[static_cast<std::size_t>(k)] = fit.uncertainties(k);
    }
    result.omega_c = std::abs(fit.params(3));
    result.omega_c_uncertainty = fit.uncertainties(3);
    result.covariance = fit.covariance;
    result.residual_norm = fit.residual_norm;
    result.iterations = fit.iterations;
    result.converged = fit.converged;
    return result;
}

double gradient_broadened_width(double eta1, double length) {
    return std::abs(eta1) * length / two_pi;
}

}  // namespace gem
