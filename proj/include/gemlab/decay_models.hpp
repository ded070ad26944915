#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gemlab/constants.hpp"
#include "gemlab/schedule.hpp"

namespace gem {

// Efficiency decay with the control and gradient fields left on: combined
// quadratic-gradient dephasing and control-field scattering.
struct QuadraticDecayParams {
    double e0 = 1.0;        // initial efficiency scale
    double zeta = 0.0;      // 1/s, zeta = 4 eta2 sigma^2
    double sigma = 0.0;     // m, spinwave envelope width
    double length = 0.0;    // m
    double gamma_sc = 0.0;  // rad/s
    double t0 = 0.0;        // s, read/write duration offset
};

// E(t) = E0 |erf((L/4sigma) sqrt(1 - i zeta (t-t0)))|^2
//        / sqrt(zeta^2 (t-t0)^2 + 1) * exp(-Gamma_sc t)
// The erf argument is read as (L/4sigma) multiplying the square root.
double quadratic_decay_model(double t, const QuadraticDecayParams& p);

// Gamma (Omega_c / 2 Delta)^2, the control-field induced scattering rate.
double scattering_rate(double gamma, double omega_c, double delta);

struct ThermalTimescales {
    double v_bar = 0.0;      // m/s, sqrt(kB T / m)
    double k_sw0 = 0.0;      // rad/m, |k_p - k_c| for the given angle
    double lambda_sw = 0.0;  // m, 2 pi / k_sw0
    double tau_l = 0.0;      // s, radial atom-loss time w0 / v_bar
    double tau_d = 0.0;      // s, longitudinal dephasing time lambda_sw / (2 pi v_bar)
};

ThermalTimescales thermal_timescales(double temperature, double mass, double waist, double theta,
                                     double lambda_probe = constants::rb87_d1_wavelength,
                                     double hyperfine_splitting = constants::rb87_hyperfine_splitting);

// E(t) = E0 / [1 + (t/tau_l)^2]^2 * exp(-(t/tau_d)^2 / (1 + (t/tau_l)^2)).
// tau_d may be +infinity (pure radial loss).
double thermal_decay_model(double t, double e0, double tau_l, double tau_d);

// k(t) = k0 + integral of eta1(t') dt' over the gradient history.
double spinwave_k_evolution(double k0, const GradientSchedule& history, double t);

enum class DecayModelKind {
    quadratic,          // floats (E0, zeta, Gamma_sc); sigma, L, t0 fixed
    thermal,            // floats (E0, tau_l, tau_d)
    thermal_fixed_tau_l // floats (E0, tau_d); tau_l fixed
};

struct DecayPoint {
    double t = 0.0;
    double efficiency = 0.0;
    double sigma = 0.0;  // 0 -> unweighted
};

struct DecayFitGuess {
    QuadraticDecayParams quadratic;  // initial values + fixed geometry
    double e0 = 1.0;
    double tau_l = 1e-3;
    double tau_d = 1e-2;
};

struct DecayFitResult {
    DecayModelKind kind = DecayModelKind::thermal;
    std::vector<std::string> param_names;
    Eigen::VectorXd params;
    Eigen::VectorXd uncertainties;
    Eigen::MatrixXd covariance;
    double residual_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

DecayFitResult fit_decay(const std::vector<DecayPoint>& points, DecayModelKind kind,
                         const DecayFitGuess& guess);

}  // namespace gem
