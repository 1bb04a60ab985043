#include "spo/weights.hpp"

namespace spo {

PortfolioWeights PortfolioWeights::from_vector(Eigen::VectorXd w) {
  PortfolioWeights out;
  out.support.reserve(static_cast<std::size_t>(w.size()));
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    if (w[j] > 0.0) {
      out.support.push_back(static_cast<int>(j));
    }
  }
  out.weights = std::move(w);
  return out;
}

PortfolioWeights PortfolioWeights::normalized(const Eigen::VectorXd& raw) {
  const double total = raw.sum();
  if (!(total > 0.0)) {
    return from_vector(Eigen::VectorXd::Zero(raw.size()));
  }
  return from_vector(raw / total);
}

}  // namespace spo
