#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "spo/price_matrix.hpp"
#include "spo/utility.hpp"

namespace spo {

/// The l1-regularized sample-average problem bound to one data matrix:
///
///   minimize over w >= 0:   P(w) = h(w) + lambda ||w||_1,
///   h(w) = -(1/n) sum_i u(x_i . w)
///
/// together with its Fenchel dual
///
///   maximize over feasible theta:  D(theta) = (1/n) sum_i u*(n lambda theta_i)
///
/// where feasibility means theta > 0 coordinatewise and
/// max_j max(X_j . theta, 0) <= 1.
///
/// The matrix is held by reference; the caller keeps it alive.
class Problem {
 public:
  Problem(const PriceRelativeMatrix& data, UtilitySpec utility, double lambda);

  const PriceRelativeMatrix& data() const { return *data_; }
  const UtilitySpec& utility() const { return utility_; }
  double lambda() const { return lambda_; }
  Problem with_lambda(double lambda) const { return Problem(*data_, utility_, lambda); }

  /// h(w); convex in w.
  double empirical_loss(const Eigen::VectorXd& w) const;

  /// h evaluated from precomputed per-period products z = X w.
  double loss_from_products(const Eigen::VectorXd& z) const;

  /// Gradient of the per-period loss: dH(z)_i = -u'(z_i)/n.
  Eigen::VectorXd loss_inner_gradient(const Eigen::VectorXd& z) const;

  /// Gradient of h on the given coordinates; entries off `active` are zero.
  Eigen::VectorXd loss_gradient(const Eigen::VectorXd& w,
                                const std::vector<int>& active) const;

  /// P(w) = h(w) + lambda ||w||_1.
  double primal_value(const Eigen::VectorXd& w) const;

  /// Scaled feasible dual point: theta = Xi(-dH(Xw)/lambda) with
  /// Xi(z) = z / max{ max_j max(X_j . z, 0), 1 }. Always feasible by
  /// construction and strictly positive coordinatewise.
  Eigen::VectorXd dual_point_from_primal(const Eigen::VectorXd& w) const;

  /// D(theta); std::nullopt when theta is outside the dual domain
  /// (any coordinate <= 0).
  std::optional<double> dual_value(const Eigen::VectorXd& theta) const;

  /// P(w) - D(theta) for a feasible pair; nonnegative up to round-off.
  /// Throws std::invalid_argument on infeasible inputs.
  double duality_gap(const Eigen::VectorXd& w, const Eigen::VectorXd& theta) const;

 private:
  const PriceRelativeMatrix* data_;
  UtilitySpec utility_;
  double lambda_;
};

/// Smallest regularization level with an all-zero solution:
/// ||grad h(0)||_inf = u'(0) * max_j mean(X_j).
double lambda_max(const PriceRelativeMatrix& data, const UtilitySpec& utility);

/// Lipschitz constant of grad h: the largest eigenvalue of X^T D X with
/// D = diag(-u''(0)/n). D is a constant multiple of the identity, so this is
/// |u''(0)|/n times the squared spectral norm of X, computed exactly on the
/// smaller Gram side.
double loss_gradient_lipschitz(const PriceRelativeMatrix& data, const UtilitySpec& utility);

}  // namespace spo
