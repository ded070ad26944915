#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "gemlab/constants.hpp"

namespace gem {

// Per-Zeeman-line optical depths of the F=1 manifold plus the bias field
// that splits the three Raman lines.
struct ZeemanManifold {
    std::array<double, 3> od_per_line{0.0, 0.0, 0.0};  // m_F = -1, 0, +1
    double bias_field_tesla = 0.5e-4;                  // 0.5 G default
    double zeeman_shift_per_gauss = constants::rb87_zeeman_shift_per_gauss;  // rad/s/G per m_F

    void validate() const;
    // Zeeman offset of the m_F line's two-photon resonance (no light shift).
    double line_center(int m_f) const;
};

struct RamanSpectrum {
    std::vector<double> two_photon_detunings;  // rad/s, strictly increasing
    std::vector<double> transmission;          // power transmission |t|^2
    std::vector<double> phase;                 // arg t, optional (may be empty)
    std::vector<double> sigma;                 // optional noise column

    void validate() const;
};

// Complex amplitude transmission of a single far-detuned Raman line at
// two-photon detuning delta2 (relative to the bare Zeeman resonance).
//
// The adopted steady-state form is a Lorentzian Raman susceptibility with
//   gamma_R = gamma0 + Gamma (Omega_c / 2 Delta)^2   (line HWHM)
//   d_R     = od * Gamma * Omega_c^2 / (4 Delta^2 gamma_R)   (line-center depth)
//   light shift = Omega_c^2 / (4 Delta)
// so |t|^2 = exp(-d_R) exactly at the shifted line center. See the module
// notes in docs/raman_line.md for the derivation from the three-level
// optical Bloch equations and the conventions used here.
cplx raman_transmission(double delta2, double od, double omega_c, double delta, double gamma,
                        double gamma0);

// Product of the three m_F lines with Zeeman-shifted centers.
RamanSpectrum simulate_manifold_spectrum(const ZeemanManifold& manifold, double omega_c,
                                         double delta, double gamma, double gamma0,
                                         const std::vector<double>& detuning_grid);

// Gradient-broadened variant: the single-line response is integrated over z
// with the local detuning delta(z) = eta1 (z - L/2) subtracted, rather than
// convolving the unbroadened line with anything.
RamanSpectrum simulate_broadened_spectrum(const ZeemanManifold& manifold, double omega_c,
                                          double delta, double gamma, double gamma0, double eta1,
                                          double length, const std::vector<double>& detuning_grid);

struct SpectrumFitSetup {
    ZeemanManifold manifold_guess;  // initial ODs; bias/shift held fixed
    double omega_c_guess = 0.0;     // rad/s
    double delta = two_pi * 325e6;  // rad/s, fixed
    double gamma = constants::rb87_d1_linewidth;  // rad/s, fixed
    double gamma0 = 0.0;                          // rad/s, fixed
};

struct SpectrumFitResult {
    std::array<double, 3> od_per_line{};
    double omega_c = 0.0;
    std::array<double, 3> od_uncertainty{};
    double omega_c_uncertainty = 0.0;
    Eigen::MatrixXd covariance;  // over (od -1, od 0, od +1, omega_c)
    double residual_norm = 0.0;
    int iterations = 0;
    bool converged = true;
};

// Least-squares fit of the manifold model to a measured power spectrum.
// Throws on degenerate (flat) data; non-convergence is reported in-place.
SpectrumFitResult fit_spectrum(const RamanSpectrum& measured, const SpectrumFitSetup& setup);

// Full width (Hz) of a Raman feature broadened by a linear gradient.
double gradient_broadened_width(double eta1, double length);

}  // namespace gem
