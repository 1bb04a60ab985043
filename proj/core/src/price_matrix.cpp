#include "spo/price_matrix.hpp"

#include <cmath>
#include <string>

#include "spo/errors.hpp"

namespace spo {

PriceRelativeMatrix::PriceRelativeMatrix(Eigen::MatrixXd values)
    : values_(std::move(values)) {
  column_norms_.resize(values_.cols());
  for (Eigen::Index j = 0; j < values_.cols(); ++j) {
    column_norms_[j] = values_.col(j).norm();
  }
}

PriceRelativeMatrix PriceRelativeMatrix::validated(Eigen::MatrixXd values) {
  for (Eigen::Index j = 0; j < values.cols(); ++j) {
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
      const double v = values(i, j);
      if (!std::isfinite(v) || !(v > 0.0)) {
        throw DataError("price relative at (" + std::to_string(i) + "," +
                        std::to_string(j) + ") must be finite and > 0, got " +
                        std::to_string(v));
      }
    }
  }
  return PriceRelativeMatrix(std::move(values));
}

PriceRelativeMatrix PriceRelativeMatrix::unchecked(Eigen::MatrixXd values) {
  return PriceRelativeMatrix(std::move(values));
}

double PriceRelativeMatrix::min_entry() const {
  return values_.size() == 0 ? 0.0 : values_.minCoeff();
}

}  // namespace spo
