#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace mdsr {

using ResidualFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct LeastSquaresOptions {
  int max_iterations = 200;
  double step_tolerance = 1e-10;      ///< converged when an accepted step is shorter
  double decrease_tolerance = 1e-12;  ///< ... or the residual norm drops by less
  double difference_step = 1e-6;      ///< central-difference step in parameter space
  double initial_damping = 1e-3;
};

struct LeastSquaresResult {
  Eigen::VectorXd parameters;
  Eigen::VectorXd residuals;
  Eigen::MatrixXd jacobian;          ///< at `parameters`
  double residual_norm = 0.0;
  int iterations = 0;                ///< Jacobian evaluations
  bool converged = false;
  std::vector<double> norm_history;  ///< residual norm after every accepted step
};

/// Central-difference Jacobian of f at x.
Eigen::MatrixXd central_difference_jacobian(const ResidualFunction& f, const Eigen::VectorXd& x, double step);

/// sigma_max / sigma_min of J; +inf for a rank-deficient or empty Jacobian.
double condition_number(const Eigen::MatrixXd& jacobian);

/// Damped Gauss-Newton (Levenberg-Marquardt with Marquardt diagonal scaling).
/// A trial step is accepted only if it lowers the residual norm, so
/// norm_history is non-increasing. Never throws on non-convergence; the
/// result carries converged = false instead.
LeastSquaresResult levenberg_marquardt(const ResidualFunction& f, Eigen::VectorXd x0,
                                       const LeastSquaresOptions& options = {});

}  // namespace mdsr
