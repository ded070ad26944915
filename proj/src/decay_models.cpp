#include "gemlab/decay_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gemlab/complex_erf.hpp"
#include "gemlab/levmar.hpp"

namespace gem {

double quadratic_decay_model(double t, const QuadraticDecayParams& p) {
    if (!(t >= 0.0)) throw std::invalid_argument("quadratic_decay_model: t must be >= 0");
    if (!(p.sigma > 0.0) || !(p.length > 0.0))
        throw std::invalid_argument("quadratic_decay_model: sigma and length must be > 0");

    const double dt = t - p.t0;
    const double zt = p.zeta * dt;
    const cplx arg = (p.length / (4.0 * p.sigma)) * std::sqrt(cplx(1.0, -zt));
    const double erf_sq = std::norm(complex_erf(arg));
    return p.e0 * erf_sq / std::sqrt(zt * zt + 1.0) * std::exp(-p.gamma_sc * t);
}

double scattering_rate(double gamma, double omega_c, double delta) {
    if (delta == 0.0) throw std::invalid_argument("scattering_rate: Delta must be nonzero");
    const double r = omega_c / (2.0 * delta);
    return gamma * r * r;
}

ThermalTimescales thermal_timescales(double temperature, double mass, double waist, double theta,
                                     double lambda_probe, double hyperfine_splitting) {
    if (!(temperature > 0.0) || !(mass > 0.0) || !(waist > 0.0) || !(lambda_probe > 0.0))
        throw std::invalid_argument("thermal_timescales: parameters must be > 0");
    if (theta < 0.0 || theta >= pi / 2.0)
        throw std::invalid_argument("thermal_timescales: theta must be in [0, pi/2)");

    ThermalTimescales out;
    out.v_bar = std::sqrt(constants::k_boltzmann * temperature / mass);

    // |k_p - k_c|^2 = (k_p - k_c)^2 + 4 k_p k_c sin^2(theta/2), written to
    // avoid cancellation at small angles where dk << k_p
    const double k_p = two_pi / lambda_probe;
    const double dk = hyperfine_splitting / constants::speed_of_light;
    const double k_c = k_p - dk;
    const double s = std::sin(0.5 * theta);
    out.k_sw0 = std::sqrt(dk * dk + 4.0 * k_p * k_c * s * s);
    out.lambda_sw = two_pi / out.k_sw0;
    out.tau_l = waist / out.v_bar;
    out.tau_d = out.lambda_sw / (two_pi * out.v_bar);
    return out;
}

double thermal_decay_model(double t, double e0, double tau_l, double tau_d) {
    if (!(t >= 0.0)) throw std::invalid_argument("thermal_decay_model: t must be >= 0");
    if (!(tau_l > 0.0) || !(tau_d > 0.0))
        throw std::invalid_argument("thermal_decay_model: time constants must be > 0");
    const double u = t / tau_l;
    const double loss = 1.0 + u * u;
    double dephase = 0.0;
    if (std::isfinite(tau_d)) {
        const double v = t / tau_d;
        dephase = v * v / loss;
    }
    return e0 / (loss * loss) * std::exp(-dephase);
}

double spinwave_k_evolution(double k0, const GradientSchedule& history, double t) {
    if (t < 0.0) throw std::invalid_argument("spinwave_k_evolution: t must be >= 0");
    history.validate();

    // eta1(t) is piecewise constant; walk the breakpoints and accumulate.
    std::vector<double> breaks = {0.0, t};
    if (history.flip_time > 0.0 && history.flip_time < t) breaks.push_back(history.flip_time);
    for (const TimeWindow& w : history.off_intervals) {
        if (w.t_start > 0.0 && w.t_start < t) breaks.push_back(w.t_start);
        if (w.t_end > 0.0 && w.t_end < t) breaks.push_back(w.t_end);
    }
    std::sort(breaks.begin(), breaks.end());

    double k = k0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double mid = 0.5 * (breaks[i] + breaks[i + 1]);
        k += history.eta1_at(mid) * (breaks[i + 1] - breaks[i]);
    }
    return k;
}

DecayFitResult fit_decay(const std::vector<DecayPoint>& points, DecayModelKind kind,
                         const DecayFitGuess& guess) {
    FitData data;
    for (const DecayPoint& pt : points) {
        data.x.push_back(pt.t);
        data.y.push_back(pt.efficiency);
    }
    const bool weighted = std::any_of(points.begin(), points.end(),
                                      [](const DecayPoint& p) { return p.sigma > 0.0; });
    if (weighted) {
        for (const DecayPoint& pt : points) {
            if (!(pt.sigma > 0.0))
                throw std::invalid_argument("fit_decay: mixed weighted/unweighted points");
            data.sigma.push_back(pt.sigma);
        }
    }

    DecayFitResult result;
    result.kind = kind;

    // Timescales are fitted in log space: it keeps them positive, conditions
    // the near-degenerate (tau_l, tau_d) pair, and a trust cap on the step
    // stops either one escaping to infinity through the shallow valley.
    ModelFn model;
    Eigen::VectorXd p0;
    FitOptions options;
    std::vector<bool> log_scaled;

    switch (kind) {
        case DecayModelKind::quadratic: {
            result.param_names = {"E0", "zeta", "Gamma_sc"};
            log_scaled = {false, false, false};
            const QuadraticDecayParams base = guess.quadratic;
            model = [base](double t, const Eigen::VectorXd& p) {
                QuadraticDecayParams q = base;
                q.e0 = p(0);
                q.zeta = p(1);
                q.gamma_sc = p(2);
                return quadratic_decay_model(t, q);
            };
            p0.resize(3);
            p0 << base.e0, base.zeta, base.gamma_sc;
            break;
        }
        case DecayModelKind::thermal: {
            if (std::isinf(guess.tau_d)) {
                // pure radial-loss variant: tau_d pinned at infinity
                result.param_names = {"E0", "tau_l"};
                log_scaled = {false, true};
                model = [](double t, const Eigen::VectorXd& p) {
                    return thermal_decay_model(t, p(0), std::exp(p(1)),
                                               std::numeric_limits<double>::infinity());
                };
                p0.resize(2);
                p0 << guess.e0, std::log(guess.tau_l);
            } else {
                result.param_names = {"E0", "tau_l", "tau_d"};
                log_scaled = {false, true, true};
                model = [](double t, const Eigen::VectorXd& p) {
                    return thermal_decay_model(t, p(0), std::exp(p(1)), std::exp(p(2)));
                };
                p0.resize(3);
                p0 << guess.e0, std::log(guess.tau_l), std::log(guess.tau_d);
            }
            options.max_step = 1.5;
            break;
        }
        case DecayModelKind::thermal_fixed_tau_l: {
            result.param_names = {"E0", "tau_d"};
            log_scaled = {false, true};
            const double tau_l = guess.tau_l;
            model = [tau_l](double t, const Eigen::VectorXd& p) {
                return thermal_decay_model(t, p(0), tau_l, std::exp(p(1)));
            };
            p0.resize(2);
            p0 << guess.e0, std::log(guess.tau_d);
            options.max_step = 1.5;
            break;
        }
    }

    options.param_names = result.param_names;

    // The (tau_l, tau_d) pair has a shallow secondary valley with one
    // timescale escaping to infinity; a handful of starts around the guess
    // finds the global basin reliably.
    std::vector<Eigen::VectorXd> starts = {p0};
    if (kind == DecayModelKind::thermal && p0.size() == 3) {
        const double l2 = std::log(2.0);
        for (const auto& [dl, dd] : std::initializer_list<std::pair<double, double>>{
                 {-l2, -l2}, {l2, -2.0 * l2}, {-l2, l2}, {0.0, -2.0 * l2}}) {
            Eigen::VectorXd alt = p0;
            alt(1) += dl;
            alt(2) += dd;
            starts.push_back(alt);
        }
        // swapped-timescale start
        Eigen::VectorXd swapped = p0;
        std::swap(swapped(1), swapped(2));
        starts.push_back(swapped);
    }

    FitResult fit;
    bool have_fit = false;
    for (const Eigen::VectorXd& start : starts) {
        const FitResult candidate = levmar_fit(model, data, start, options);
        if (!have_fit || candidate.residual_norm < fit.residual_norm) {
            fit = candidate;
            have_fit = true;
        }
    }

    // map log-space parameters and their covariance back to timescales
    const Eigen::Index m = fit.params.size();
    Eigen::VectorXd scale = Eigen::VectorXd::Ones(m);
    result.params = fit.params;
    for (Eigen::Index k = 0; k < m; ++k) {
        if (log_scaled[static_cast<std::size_t>(k)]) {
            result.params(k) = std::exp(fit.params(k));
            scale(k) = result.params(k);
        }
    }
    result.covariance = scale.asDiagonal() * fit.covariance * scale.asDiagonal();
    result.uncertainties.resize(m);
    for (Eigen::Index k = 0; k < m; ++k) {
        const double v = result.covariance(k, k);
        result.uncertainties(k) =
            v >= 0.0 ? std::sqrt(v) : std::numeric_limits<double>::quiet_NaN();
    }
    result.residual_norm = fit.residual_norm;
    result.iterations = fit.iterations;
    result.converged = fit.converged;
    return result;
}

}  // namespace gem
