#pragma once

#include <vector>

#include <Eigen/Core>

namespace spo {

/// Allocation vector on the probability simplex with its explicit support.
/// A degenerate (all-zero) vector has an empty support.
struct PortfolioWeights {
  Eigen::VectorXd weights;
  std::vector<int> support;

  static PortfolioWeights from_vector(Eigen::VectorXd w);

  /// Normalizes a nonnegative vector onto the simplex; returns a degenerate
  /// all-zero allocation when the input sums to zero.
  static PortfolioWeights normalized(const Eigen::VectorXd& raw);

  bool degenerate() const { return support.empty(); }
};

}  // namespace spo
