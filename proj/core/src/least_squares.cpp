#include "mdsr/least_squares.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mdsr {

Eigen::MatrixXd central_difference_jacobian(const ResidualFunction& f, const Eigen::VectorXd& x, double step) {
  Eigen::MatrixXd jac;
  Eigen::VectorXd probe = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    probe(j) = x(j) + step;
    const Eigen::VectorXd up = f(probe);
    probe(j) = x(j) - step;
    const Eigen::VectorXd down = f(probe);
    probe(j) = x(j);
    if (jac.size() == 0) jac.resize(up.size(), x.size());
    jac.col(j) = (up - down) / (2.0 * step);
  }
  return jac;
}

double condition_number(const Eigen::MatrixXd& jacobian) {
  if (jacobian.size() == 0) return std::numeric_limits<double>::infinity();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jacobian);
  const auto& s = svd.singularValues();
  const double smallest = s(s.size() - 1);
  if (!(smallest > 0.0)) return std::numeric_limits<double>::infinity();
  return s(0) / smallest;
}

LeastSquaresResult levenberg_marquardt(const ResidualFunction& f, Eigen::VectorXd x0,
                                       const LeastSquaresOptions& options) {
  LeastSquaresResult result;
  result.parameters = std::move(x0);
  result.residuals = f(result.parameters);
  result.residual_norm = result.residuals.norm();
  result.norm_history.push_back(result.residual_norm);

  double damping = options.initial_damping;
  const auto n = result.parameters.size();

  while (result.iterations < options.max_iterations) {
    ++result.iterations;
    result.jacobian = central_difference_jacobian(f, result.parameters, options.difference_step);
    const Eigen::MatrixXd normal = result.jacobian.transpose() * result.jacobian;
    const Eigen::VectorXd gradient = result.jacobian.transpose() * result.residuals;
    const double diag_floor = 1e-12 * std::max(normal.diagonal().maxCoeff(), 1e-300);

    bool accepted = false;
    Eigen::VectorXd step;
    Eigen::VectorXd trial_residuals;
    double trial_norm = 0.0;
    while (damping < 1e20) {
      Eigen::MatrixXd damped = normal;
      for (Eigen::Index i = 0; i < n; ++i) damped(i, i) += damping * std::max(normal(i, i), diag_floor);
      step = damped.ldlt().solve(-gradient);
      if (!step.allFinite()) {
        damping *= 10.0;
        continue;
      }
      trial_residuals = f(result.parameters + step);
      trial_norm = trial_residuals.norm();
      if (std::isfinite(trial_norm) && trial_norm < result.residual_norm) {
        accepted = true;
        damping = std::max(damping / 10.0, 1e-15);
        break;
      }
      if (step.norm() < options.step_tolerance) break;
      damping *= 10.0;
    }

    if (!accepted) {
      // No descent direction left at numerical precision: a stationary point.
      result.converged = true;
      break;
    }

    const double decrease = result.residual_norm - trial_norm;
    result.parameters += step;
    result.residuals = std::move(trial_residuals);
    result.residual_norm = trial_norm;
    result.norm_history.push_back(trial_norm);
    if (step.norm() < options.step_tolerance || decrease < options.decrease_tolerance) {
      result.converged = true;
      break;
    }
  }

  result.jacobian = central_difference_jacobian(f, result.parameters, options.difference_step);
  return result;
}

}  // namespace mdsr
