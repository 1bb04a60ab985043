#include "spo/screening.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace spo {

ScreenState ScreenState::all_active(int num_assets, double alpha) {
  ScreenState s;
  s.active.resize(num_assets);
  std::iota(s.active.begin(), s.active.end(), 0);
  s.alpha = alpha;
  return s;
}

double strong_concavity_alpha(const UtilitySpec& utility, double lambda, int n_samples) {
  utility.validate(/*for_solver=*/true);
  if (!(lambda > 0.0) || n_samples < 1) {
    throw std::invalid_argument("strong_concavity_alpha: need lambda > 0 and n >= 1");
  }
  return static_cast<double>(n_samples) * lambda * lambda / lipschitz_constants(utility).grad;
}

double safe_radius(double gap, double alpha) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("safe_radius: alpha must be > 0, got " +
                                std::to_string(alpha));
  }
  return std::sqrt(2.0 * std::max(gap, 0.0) / alpha);
}

ScreenState screen_with_correlations(const Eigen::VectorXd& correlations,
                                     const Eigen::VectorXd& column_norms,
                                     double radius, ScreenState state) {
  std::vector<int> kept;
  std::vector<int> removed;
  kept.reserve(state.active.size());
  for (int j : state.active) {
    const double bound = std::max(correlations[j], 0.0) + radius * column_norms[j];
    if (bound < 1.0) {
      removed.push_back(j);
    } else {
      kept.push_back(j);
    }
  }
  if (!removed.empty()) {
    const std::size_t old_size = state.screened.size();
    state.screened.insert(state.screened.end(), removed.begin(), removed.end());
    std::inplace_merge(state.screened.begin(),
                       state.screened.begin() + static_cast<std::ptrdiff_t>(old_size),
                       state.screened.end());
    state.active = std::move(kept);
  }
  state.radius = radius;
  return state;
}

ScreenState screen(const PriceRelativeMatrix& data, const Eigen::VectorXd& theta,
                   double radius, ScreenState state) {
  Eigen::VectorXd correlations(data.assets());
  for (int j : state.active) {
    correlations[j] = data.values().col(j).dot(theta);
  }
  return screen_with_correlations(correlations, data.column_norms(), radius,
                                  std::move(state));
}

}  // namespace spo
