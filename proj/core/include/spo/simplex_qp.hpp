#pragma once

#include <limits>

#include <Eigen/Core>

namespace spo {

/// Euclidean projection onto the probability simplex (sort-and-shift).
Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v);

struct QpResult {
  Eigen::VectorXd w;
  bool converged = false;
  int iterations = 0;
  double kkt_residual = std::numeric_limits<double>::infinity();
};

/// Minimizes w'Qw + b'w over the probability simplex by projected gradient
/// with momentum and function-value restarts. Stops when the fixed-point
/// residual ||w - proj(w - grad f(w))||_inf falls below kkt_tol.
QpResult minimize_quadratic_on_simplex(const Eigen::MatrixXd& Q, const Eigen::VectorXd& b,
                                       double kkt_tol = 1e-8, int max_iter = 10000);

}  // namespace spo
