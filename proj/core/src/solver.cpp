#include "spo/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "spo/errors.hpp"

namespace spo {

namespace {

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

Eigen::VectorXd active_products(const Eigen::MatrixXd& X, const Eigen::VectorXd& w,
                                const std::vector<int>& active) {
  Eigen::VectorXd z = Eigen::VectorXd::Zero(X.rows());
  for (int j : active) {
    const double wj = w[j];
    if (wj != 0.0) {
      z.noalias() += wj * X.col(j);
    }
  }
  return z;
}

double accelerated_coordinate(double prev, double curr, double candidate) {
  const double delta = candidate - curr;
  if (delta * (curr - prev) < 0.0) {
    // oscillation: bisect toward the enclosing pair
    return delta > 0.0 ? 0.5 * (curr + std::min(prev, candidate))
                       : 0.5 * (curr + std::max(prev, candidate));
  }
  if (candidate > curr && curr > prev) {
    // two consecutive increases: extrapolate
    return 2.0 * candidate - curr;
  }
  return candidate;
}

void validate_config(const SolverConfig& cfg) {
  if (cfg.max_iter < 1) {
    throw std::invalid_argument("solver: max_iter must be >= 1");
  }
  if (!(cfg.tol > 0.0)) {
    throw std::invalid_argument("solver: tol must be > 0");
  }
  if (cfg.step_size != 0.0 && !(cfg.step_size > 0.0)) {
    throw std::invalid_argument("solver: explicit step size must be > 0");
  }
}

double resolve_step(const Problem& p, const SolverConfig& cfg) {
  if (cfg.step_size > 0.0) return cfg.step_size;
  const double L = loss_gradient_lipschitz(p.data(), p.utility());
  if (!(L > 0.0) || !std::isfinite(L)) {
    throw NumericalError("solver: could not determine a positive step size");
  }
  return 1.0 / L;
}

}  // namespace

SolverConfig SolverConfig::cross_validation() {
  SolverConfig cfg;
  cfg.max_iter = 10000;
  cfg.tol = 1e-5;
  return cfg;
}

SolverConfig SolverConfig::final_fit() {
  SolverConfig cfg;
  cfg.max_iter = 100000;
  cfg.tol = 1e-8;
  return cfg;
}

double prox_l1_nonneg_admm(double value, double threshold, double rho,
                           int max_iter, double tol) {
  if (!(rho > 0.0)) {
    throw std::invalid_argument("prox admm: rho must be > 0");
  }
  double p = std::max(value, 0.0);
  double q = value - p;
  double v = 0.0;
  for (int k = 0; k < max_iter; ++k) {
    const double v_old = v;
    v = soft_threshold(p - q, threshold / rho);
    p = std::max(value + rho * (v + q), 0.0) / (1.0 + rho);
    q = q + v - p;
    if (value < 0.0 && v <= tol && p <= tol) {
      // iterate pinned at the boundary; the minimizer is zero
      return 0.0;
    }
    if (std::abs(v - p) <= tol && std::abs(v - v_old) <= tol) {
      break;
    }
  }
  return std::max(v, 0.0);
}

Eigen::VectorXd prox_l1_nonneg(const Eigen::VectorXd& v, double threshold,
                               const SolverConfig& cfg) {
  if (!(threshold >= 0.0)) {
    throw std::invalid_argument("prox: threshold must be >= 0");
  }
  Eigen::VectorXd out(v.size());
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    if (v[j] >= 0.0) {
      out[j] = std::max(v[j] - threshold, 0.0);
    } else {
      out[j] = prox_l1_nonneg_admm(v[j], threshold, cfg.admm_rho, cfg.admm_max_iter,
                                   cfg.admm_tol);
    }
  }
  return out;
}

SolverState initial_state(const Problem& problem, const SolverConfig& cfg,
                          const Eigen::VectorXd* warm_start) {
  validate_config(cfg);
  problem.utility().validate(/*for_solver=*/true);
  const int d = static_cast<int>(problem.data().assets());
  const int n = static_cast<int>(problem.data().periods());
  SolverState s;
  if (warm_start) {
    if (warm_start->size() != d) {
      throw std::invalid_argument("solver: warm start has wrong dimension");
    }
    if (warm_start->minCoeff() < 0.0) {
      throw std::invalid_argument("solver: warm start must be nonnegative");
    }
    s.w = *warm_start;
  } else {
    s.w = Eigen::VectorXd::Zero(d);
  }
  s.w_prev = s.w;
  s.screen = ScreenState::all_active(
      d, strong_concavity_alpha(problem.utility(), problem.lambda(), n));
  s.step_size = resolve_step(problem, cfg);
  return s;
}

SolverState pgd_step(SolverState state, const Problem& problem, const SolverConfig& cfg) {
  if (!(state.step_size > 0.0)) {
    state.step_size = resolve_step(problem, cfg);
  }
  const Eigen::MatrixXd& X = problem.data().values();
  const Eigen::VectorXd z = active_products(X, state.w, state.screen.active);
  const Eigen::VectorXd dH = problem.loss_inner_gradient(z);

  const std::size_t m = state.screen.active.size();
  Eigen::VectorXd shifted(static_cast<Eigen::Index>(m));
  for (std::size_t k = 0; k < m; ++k) {
    const int j = state.screen.active[k];
    shifted[static_cast<Eigen::Index>(k)] =
        state.w[j] - state.step_size * X.col(j).dot(dH);
  }
  const Eigen::VectorXd updated =
      prox_l1_nonneg(shifted, state.step_size * problem.lambda(), cfg);

  state.w_prev = state.w;
  for (std::size_t k = 0; k < m; ++k) {
    state.w[state.screen.active[k]] = updated[static_cast<Eigen::Index>(k)];
  }
  for (int j : state.screen.screened) {
    state.w[j] = 0.0;
  }
  state.iteration += 1;
  return state;
}

Eigen::VectorXd accelerated_update(const Eigen::VectorXd& w_prev,
                                   const Eigen::VectorXd& w_curr,
                                   const Eigen::VectorXd& gradient,
                                   const std::vector<int>& active,
                                   double lambda, double step) {
  Eigen::VectorXd next = Eigen::VectorXd::Zero(w_curr.size());
  for (int j : active) {
    const double candidate = std::max(w_curr[j] - step * (gradient[j] + lambda), 0.0);
    next[j] = accelerated_coordinate(w_prev[j], w_curr[j], candidate);
  }
  return next;
}

SolveResult solve(const Problem& problem, const SolverConfig& cfg,
                  const Eigen::VectorXd* warm_start) {
  validate_config(cfg);
  problem.utility().validate(/*for_solver=*/true);

  const Eigen::MatrixXd& X = problem.data().values();
  const int d = static_cast<int>(X.cols());
  const int n = static_cast<int>(X.rows());
  const double lambda = problem.lambda();
  const double inv_n = 1.0 / static_cast<double>(n);

  Eigen::VectorXd w;
  if (warm_start) {
    if (warm_start->size() != d) {
      throw std::invalid_argument("solver: warm start has wrong dimension");
    }
    if (warm_start->minCoeff() < 0.0) {
      throw std::invalid_argument("solver: warm start must be nonnegative");
    }
    w = *warm_start;
  } else {
    w = Eigen::VectorXd::Zero(d);
  }
  Eigen::VectorXd w_prev = w;

  const double step = resolve_step(problem, cfg);
  const double alpha = strong_concavity_alpha(problem.utility(), lambda, n);
  ScreenState screen_state = ScreenState::all_active(d, alpha);

  SolveResult res;
  res.lambda = lambda;
  res.step_size = step;

  const int cadence = std::max(1, cfg.screen_every);
  const auto started = std::chrono::steady_clock::now();
  double gap = std::numeric_limits<double>::infinity();
  bool converged = false;
  int iterations = 0;

  for (int t = 1; t <= cfg.max_iter; ++t) {
    iterations = t;
    const std::vector<int>& active = screen_state.active;

    // gradient step + prox on the active coordinates
    {
      const Eigen::VectorXd z = active_products(X, w, active);
      const Eigen::VectorXd dH = problem.loss_inner_gradient(z);
      const bool accel = cfg.accelerate && t >= 2;
      for (int j : active) {
        const double gj = X.col(j).dot(dH);
        const double wj = w[j];
        const double candidate = std::max(wj - step * (gj + lambda), 0.0);
        w[j] = accel ? accelerated_coordinate(w_prev[j], wj, candidate) : candidate;
        w_prev[j] = wj;
      }
      res.counters.grad_coordinates += static_cast<long long>(active.size());
      res.counters.prox_coordinates += static_cast<long long>(active.size());
    }

    const bool check_now = (t % cadence == 0) || t == 1 || t == cfg.max_iter;
    if (!check_now) continue;

    // dual scaling over all columns, then gap
    const Eigen::VectorXd z = active_products(X, w, active);
    const Eigen::VectorXd psi = -problem.loss_inner_gradient(z) / lambda;
    const Eigen::VectorXd corr = X.transpose() * psi;
    res.counters.dual_evaluations += 1;
    const double denom = std::max(std::max(corr.maxCoeff(), 0.0), 1.0);

    const double primal = problem.loss_from_products(z) + lambda * w.sum();
    double dual = 0.0;
    for (int i = 0; i < n; ++i) {
      dual += conjugate_value(problem.utility(), static_cast<double>(n) * lambda *
                                                     psi[i] / denom);
    }
    dual *= inv_n;
    gap = primal - dual;

    if (!std::isfinite(gap) || !w.allFinite()) {
      throw NumericalError("solver: non-finite values at iteration " + std::to_string(t));
    }

    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    res.trace.push_back(
        {t, gap, primal, static_cast<int>(screen_state.screened.size()), seconds});

    if (gap <= cfg.tol) {
      converged = true;
      break;
    }

    if (cfg.screening && !active.empty()) {
      const double radius = safe_radius(gap, alpha);
      res.counters.screen_coordinates += static_cast<long long>(active.size());
      const Eigen::VectorXd scaled_corr = corr / denom;
      const std::size_t before = screen_state.screened.size();
      screen_state = screen_with_correlations(scaled_corr, problem.data().column_norms(),
                                              radius, std::move(screen_state));
      if (screen_state.screened.size() > before) {
        for (int j : screen_state.screened) {
          w[j] = 0.0;
          w_prev[j] = 0.0;
        }
      }
    }
  }

  res.converged = converged;
  res.iterations = iterations;
  res.gap = gap;
  res.screened_indices = screen_state.screened;
  res.weights_raw = w;
  res.weights = PortfolioWeights::normalized(w);
  res.degenerate = res.weights.degenerate();
  return res;
}

std::vector<double> default_lambda_grid(double lambda_max_value, int points,
                                        double decades) {
  if (!(lambda_max_value > 0.0)) {
    throw std::invalid_argument("lambda grid: lambda_max must be > 0");
  }
  if (points < 1 || !(decades > 0.0)) {
    throw std::invalid_argument("lambda grid: need points >= 1 and decades > 0");
  }
  std::vector<double> grid(static_cast<std::size_t>(points));
  grid.front() = lambda_max_value;
  if (points == 1) return grid;
  const double base = std::log10(lambda_max_value);
  for (int i = 1; i < points - 1; ++i) {
    grid[static_cast<std::size_t>(i)] =
        std::pow(10.0, base - decades * static_cast<double>(i) /
                                  static_cast<double>(points - 1));
  }
  grid.back() = lambda_max_value * std::pow(10.0, -decades);
  return grid;
}

PathResult solve_path(const PriceRelativeMatrix& data, const UtilitySpec& utility,
                      const std::vector<double>& grid, const SolverConfig& cfg) {
  if (grid.empty()) {
    throw std::invalid_argument("solve_path: empty lambda grid");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0)) {
      throw std::invalid_argument("solve_path: grid values must be > 0");
    }
    if (i > 0 && !(grid[i] < grid[i - 1])) {
      throw std::invalid_argument("solve_path: grid must be strictly decreasing");
    }
  }

  PathResult path;
  path.lambdas = grid;
  path.results.reserve(grid.size());
  path.support_sizes.reserve(grid.size());

  Eigen::VectorXd warm = Eigen::VectorXd::Zero(data.assets());
  for (double lambda : grid) {
    Problem problem(data, utility, lambda);
    SolveResult r = solve(problem, cfg, &warm);
    warm = r.weights_raw;
    path.support_sizes.push_back(r.support_size());
    path.results.push_back(std::move(r));
  }
  for (std::size_t i = 1; i < path.support_sizes.size(); ++i) {
    if (path.support_sizes[i] < path.support_sizes[i - 1]) {
      path.support_monotonicity_violations += 1;
    }
  }
  return path;
}

PathSelection select_by_cardinality(const PathResult& path, int max_assets,
                                    std::optional<int> min_assets) {
  if (path.results.empty()) {
    throw std::invalid_argument("select_by_cardinality: empty path");
  }
  if (max_assets < 1) {
    throw std::invalid_argument("select_by_cardinality: max_assets must be >= 1");
  }
  const int m = static_cast<int>(path.results.size());

  PathSelection sel;
  if (min_assets) {
    // largest lambda whose support reaches the floor
    for (int i = 0; i < m; ++i) {
      if (path.support_sizes[static_cast<std::size_t>(i)] >= *min_assets) {
        return {i, path.lambdas[static_cast<std::size_t>(i)], true};
      }
    }
    int best = 0;
    for (int i = 1; i < m; ++i) {
      if (path.support_sizes[static_cast<std::size_t>(i)] >
          path.support_sizes[static_cast<std::size_t>(best)]) {
        best = i;
      }
    }
    return {best, path.lambdas[static_cast<std::size_t>(best)], false};
  }

  // largest support within the budget; first (largest-lambda) index on ties
  int best = -1;
  for (int i = 0; i < m; ++i) {
    const int s = path.support_sizes[static_cast<std::size_t>(i)];
    if (s >= 1 && s <= max_assets &&
        (best < 0 || s > path.support_sizes[static_cast<std::size_t>(best)])) {
      best = i;
    }
  }
  if (best >= 0) {
    return {best, path.lambdas[static_cast<std::size_t>(best)], true};
  }
  // nothing fits the budget: closest support, largest lambda on ties
  best = 0;
  long long best_dist = std::llabs(
      static_cast<long long>(path.support_sizes[0]) - static_cast<long long>(max_assets));
  for (int i = 1; i < m; ++i) {
    const long long dist =
        std::llabs(static_cast<long long>(path.support_sizes[static_cast<std::size_t>(i)]) -
                   static_cast<long long>(max_assets));
    if (dist < best_dist) {
      best = i;
      best_dist = dist;
    }
  }
  return {best, path.lambdas[static_cast<std::size_t>(best)], false};
}

}  // namespace spo
