#include "gemlab/levmar.hpp"

#include <cmath>

namespace gem {

namespace {

Eigen::VectorXd residuals(const ModelFn& model, const FitData& data, const Eigen::VectorXd& p) {
    const std::size_t n = data.x.size();
    Eigen::VectorXd r(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const double w = data.sigma.empty() ? 1.0 : 1.0 / data.sigma[i];
        r(static_cast<Eigen::Index>(i)) = (data.y[i] - model(data.x[i], p)) * w;
    }
    return r;
}

Eigen::MatrixXd jacobian(const ModelFn& model, const FitData& data, const Eigen::VectorXd& p) {
    const Eigen::Index n = static_cast<Eigen::Index>(data.x.size());
    const Eigen::Index m = p.size();
    Eigen::MatrixXd j(n, m);
    for (Eigen::Index k = 0; k < m; ++k) {
        const double h = 1e-7 * std::max(std::abs(p(k)), 1e-8);
        Eigen::VectorXd pp = p, pm = p;
        pp(k) += h;
        pm(k) -= h;
        const Eigen::VectorXd rp = residuals(model, data, pp);
        const Eigen::VectorXd rm = residuals(model, data, pm);
        j.col(k) = (rm - rp) / (2.0 * h);  // d(residual)/dp = -d(model)/dp
    }
    return j;
}

std::string param_label(const FitOptions& options, int k) {
    if (k >= 0 && k < static_cast<int>(options.param_names.size()))
        return options.param_names[static_cast<std::size_t>(k)];
    return "parameter " + std::to_string(k);
}

}  // namespace

FitResult levmar_fit(const ModelFn& model, const FitData& data, Eigen::VectorXd guess,
                     const FitOptions& options) {
    if (data.x.size() != data.y.size())
        throw std::invalid_argument("levmar_fit: x and y sizes differ");
    if (!data.sigma.empty() && data.sigma.size() != data.x.size())
        throw std::invalid_argument("levmar_fit: sigma size mismatch");
    const Eigen::Index m = guess.size();
    if (static_cast<Eigen::Index>(data.x.size()) < m + 1)
        throw std::invalid_argument("levmar_fit: need at least n_params + 1 points");

    Eigen::VectorXd p = guess;
    Eigen::VectorXd r = residuals(model, data, p);
    double cost = r.squaredNorm();
    double lambda = options.initial_lambda;

    FitResult result;
    Eigen::MatrixXd j = jacobian(model, data, p);

    // Degenerate problems (duplicated points, a parameter the model ignores)
    // show up as a rank-deficient Jacobian at the starting point. Transient
    // ill-conditioning during iteration is handled by the damping instead.
    {
        const Eigen::MatrixXd jtj0 = j.transpose() * j;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jtj0);
        const double max_eig = es.eigenvalues().maxCoeff();
        const double min_eig = es.eigenvalues().minCoeff();
        if (!(max_eig > 0.0) || min_eig <= max_eig * 1e-24) {
            Eigen::Index worst = 0;
            es.eigenvectors().col(0).cwiseAbs().maxCoeff(&worst);
            throw SingularJacobianError(
                "levmar_fit: singular Jacobian, degenerate in " +
                    param_label(options, static_cast<int>(worst)),
                static_cast<int>(worst));
        }
    }

    for (int iter = 0; iter < options.max_iterations; ++iter) {
        result.iterations = iter + 1;

        const Eigen::MatrixXd jtj = j.transpose() * j;
        const Eigen::VectorXd jtr = j.transpose() * r;

        bool stepped = false;
        for (int attempt = 0; attempt < 30; ++attempt) {
            Eigen::MatrixXd a = jtj;
            for (Eigen::Index k = 0; k < m; ++k) a(k, k) += lambda * std::max(jtj(k, k), 1e-30);
            Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
            if (ldlt.info() != Eigen::Success) {
                lambda *= 10.0;
                continue;
            }
            Eigen::VectorXd step = ldlt.solve(jtr);
            if (options.max_step > 0.0 && step.norm() > options.max_step)
                step *= options.max_step / step.norm();
            const Eigen::VectorXd p_try = p + step;
            const Eigen::VectorXd r_try = residuals(model, data, p_try);
            const double cost_try = r_try.squaredNorm();
            if (std::isfinite(cost_try) && cost_try <= cost) {
                const bool small_step =
                    step.norm() < options.step_tol * (p.norm() + options.step_tol);
                const bool small_improvement = (cost - cost_try) <= 1e-14 * std::max(cost, 1e-300);
                p = p_try;
                r = r_try;
                cost = cost_try;
                lambda = std::max(lambda / 3.0, 1e-12);
                stepped = true;
                if (small_step || small_improvement) result.converged = true;
                break;
            }
            lambda *= 10.0;
        }
        if (result.converged) break;
        if (!stepped) {
            // No downhill step at any damping: either at a minimum already or stuck.
            result.converged = cost == 0.0 || jtr.norm() < 1e-12 * std::sqrt(cost + 1e-300);
            break;
        }
        j = jacobian(model, data, p);
    }

    result.params = p;
    result.residual_norm = std::sqrt(cost);

    // Covariance from the final Jacobian; scaled by reduced chi^2 when no
    // per-point sigmas were supplied.
    j = jacobian(model, data, p);
    Eigen::MatrixXd jtj = j.transpose() * j;
    const double dof = static_cast<double>(data.x.size()) - static_cast<double>(m);
    double scale = 1.0;
    if (data.sigma.empty() && dof > 0.0) scale = cost / dof;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jtj);
    if (lu.isInvertible()) {
        result.covariance = lu.inverse() * scale;
    } else {
        result.covariance = Eigen::MatrixXd::Constant(m, m, std::numeric_limits<double>::quiet_NaN());
    }
    result.uncertainties.resize(m);
    for (Eigen::Index k = 0; k < m; ++k) {
        const double v = result.covariance(k, k);
        result.uncertainties(k) = v >= 0.0 ? std::sqrt(v) : std::numeric_limits<double>::quiet_NaN();
    }
    return result;
}

}  // namespace gem
