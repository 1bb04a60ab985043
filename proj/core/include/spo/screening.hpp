#pragma once

#include <limits>
#include <vector>

#include <Eigen/Core>

#include "spo/price_matrix.hpp"
#include "spo/utility.hpp"

namespace spo {

/// Partition of asset indices into a screened set (provably zero in the
/// optimum, fixed from then on) and the remaining active set. Both lists are
/// kept sorted ascending; the screened set only ever grows.
struct ScreenState {
  std::vector<int> active;
  std::vector<int> screened;
  double radius = std::numeric_limits<double>::infinity();
  double alpha = 0.0;

  static ScreenState all_active(int num_assets, double alpha);
};

/// Strong-concavity modulus of the dual objective on the set of reachable
/// dual points: n lambda^2 / L, with L the Lipschitz constant of u'.
double strong_concavity_alpha(const UtilitySpec& utility, double lambda, int n_samples);

/// Radius of the ball around a feasible dual point that is certified to
/// contain the dual optimum: sqrt(2 gap / alpha). Negative gaps from
/// round-off are clamped to zero. Throws std::invalid_argument on alpha <= 0.
double safe_radius(double gap, double alpha);

/// Moves every active j with max(X_j . theta, 0) + radius ||X_j|| < 1 into
/// the screened set. Safe: such coordinates are zero in the optimum.
ScreenState screen(const PriceRelativeMatrix& data, const Eigen::VectorXd& theta,
                   double radius, ScreenState state);

/// Same rule with X^T theta precomputed; the solver reuses the correlations
/// from its dual-scaling pass.
ScreenState screen_with_correlations(const Eigen::VectorXd& correlations,
                                     const Eigen::VectorXd& column_norms,
                                     double radius, ScreenState state);

}  // namespace spo
