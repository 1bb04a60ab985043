#pragma once

#include <Eigen/Core>

namespace spo {

/// Dense n x d matrix of gross per-period price relatives (rows = periods,
/// columns = assets) with cached Euclidean column norms.
class PriceRelativeMatrix {
 public:
  PriceRelativeMatrix() = default;

  /// Checks that every entry is finite and strictly positive; throws DataError.
  static PriceRelativeMatrix validated(Eigen::MatrixXd values);

  /// Skips the positivity check. Used for synthetic screening fixtures and
  /// factor-derived inputs that are floored elsewhere.
  static PriceRelativeMatrix unchecked(Eigen::MatrixXd values);

  const Eigen::MatrixXd& values() const { return values_; }
  const Eigen::VectorXd& column_norms() const { return column_norms_; }
  Eigen::Index periods() const { return values_.rows(); }
  Eigen::Index assets() const { return values_.cols(); }

  /// Smallest entry; the natural shift for the logarithmic utility.
  double min_entry() const;

 private:
  explicit PriceRelativeMatrix(Eigen::MatrixXd values);

  Eigen::MatrixXd values_;
  Eigen::VectorXd column_norms_;
};

}  // namespace spo
