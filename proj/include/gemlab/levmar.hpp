#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gem {

// Weighted least-squares data: y_i measured at x_i, optional 1-sigma column.
struct FitData {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> sigma;  // empty -> uniform weights
};

struct FitOptions {
    int max_iterations = 200;
    double step_tol = 1e-10;
    double initial_lambda = 1e-3;
    double max_step = 0.0;  // > 0: trust cap on the step norm per iteration
    std::vector<std::string> param_names;  // used in error messages
};

struct FitResult {
    Eigen::VectorXd params;
    Eigen::MatrixXd covariance;
    Eigen::VectorXd uncertainties;  // sqrt(diag(covariance))
    double residual_norm = 0.0;     // sqrt(weighted SSR) at the final point
    int iterations = 0;
    bool converged = false;
};

class SingularJacobianError : public std::runtime_error {
  public:
    SingularJacobianError(const std::string& msg, int param_index)
        : std::runtime_error(msg), parameter(param_index) {}
    int parameter;
};

using ModelFn = std::function<double(double x, const Eigen::VectorXd& p)>;

// Levenberg-Marquardt with a forward/central finite-difference Jacobian.
// Non-convergence is reported through FitResult::converged, not thrown; a
// rank-deficient Jacobian throws SingularJacobianError naming the parameter.
FitResult levmar_fit(const ModelFn& model, const FitData& data, Eigen::VectorXd guess,
                     const FitOptions& options = {});

}  // namespace gem
