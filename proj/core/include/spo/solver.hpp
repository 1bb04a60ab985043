#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "spo/objective.hpp"
#include "spo/screening.hpp"
#include "spo/weights.hpp"

namespace spo {

struct SolverConfig {
  int max_iter = 100000;
  double tol = 1e-8;      // duality-gap stopping threshold
  int screen_every = 30;  // cadence of the dual/gap/screen pass
  bool screening = true;  // false: gap checks at the same cadence, no elimination
  double step_size = 0.0; // <= 0 selects 1/L automatically
  bool accelerate = false;

  double admm_rho = 1.0;
  int admm_max_iter = 100;
  double admm_tol = 1e-10;

  /// Looser settings used while cross-validating the regularization level.
  static SolverConfig cross_validation();
  /// Tight settings for the final fit at the selected level.
  static SolverConfig final_fit();
};

/// Work counters; the testable proxy for wall-clock comparisons.
struct OpCounters {
  long long grad_coordinates = 0;   // per-coordinate gradient evaluations
  long long prox_coordinates = 0;   // per-coordinate proximal updates
  long long dual_evaluations = 0;   // full dual-scaling passes, O(n d) each
  long long screen_coordinates = 0; // per-coordinate screening tests
};

struct TracePoint {
  int iteration = 0;
  double gap = 0.0;
  double primal = 0.0;
  int screened = 0;
  double seconds = 0.0;  // wall clock since solve start; reported, never asserted
};

struct SolveResult {
  Eigen::VectorXd weights_raw;  // nonnegative, before normalization
  PortfolioWeights weights;     // raw / ||raw||_1, or all-zero when degenerate
  bool degenerate = false;
  bool converged = false;
  int iterations = 0;
  double gap = 0.0;
  double lambda = 0.0;
  double step_size = 0.0;
  std::vector<int> screened_indices;  // final screened set
  std::vector<TracePoint> trace;
  OpCounters counters;

  int support_size() const { return static_cast<int>(weights.support.size()); }
};

struct PathResult {
  std::vector<double> lambdas;  // strictly decreasing
  std::vector<SolveResult> results;
  std::vector<int> support_sizes;
  // support sizes are expected to grow as lambda shrinks; exceptions are
  // counted here rather than treated as errors
  int support_monotonicity_violations = 0;
};

struct PathSelection {
  int index = -1;
  double lambda = 0.0;
  bool satisfied = false;  // false: no solution qualified, `index` is the closest
};

/// argmin_y 1/2||v - y||^2 + threshold ||y||_1 over y >= 0, coordinatewise.
/// Nonnegative inputs reduce to one soft-thresholding step; negative inputs
/// run the ADMM recursion, which settles on zero.
Eigen::VectorXd prox_l1_nonneg(const Eigen::VectorXd& v, double threshold,
                               const SolverConfig& cfg = SolverConfig{});

/// Scalar ADMM route for the same operator; exposed so tests can cross-check
/// it against the closed form on both signs.
double prox_l1_nonneg_admm(double value, double threshold, double rho,
                           int max_iter, double tol);

/// One proximal-gradient iterate with its screening bookkeeping.
struct SolverState {
  Eigen::VectorXd w;
  Eigen::VectorXd w_prev;
  Eigen::VectorXd theta;  // last scaled dual point, empty before the first gap pass
  ScreenState screen;
  double gap = std::numeric_limits<double>::infinity();
  double step_size = 0.0;
  int iteration = 0;
};

SolverState initial_state(const Problem& problem, const SolverConfig& cfg,
                          const Eigen::VectorXd* warm_start = nullptr);

/// One plain proximal-gradient update on the active coordinates; screened
/// coordinates stay pinned at zero. The primal value never increases.
SolverState pgd_step(SolverState state, const Problem& problem, const SolverConfig& cfg);

/// Per-coordinate stabilized update: bisect on oscillation, extrapolate after
/// two consecutive increases, otherwise take the plain proximal candidate.
Eigen::VectorXd accelerated_update(const Eigen::VectorXd& w_prev,
                                   const Eigen::VectorXd& w_curr,
                                   const Eigen::VectorXd& gradient,
                                   const std::vector<int>& active,
                                   double lambda, double step);

/// Full proximal-gradient solve with gap-safe screening. Stops when the
/// duality gap falls below cfg.tol or max_iter is reached.
SolveResult solve(const Problem& problem, const SolverConfig& cfg,
                  const Eigen::VectorXd* warm_start = nullptr);

/// Log-spaced descending grid over `decades` orders of magnitude below
/// lambda_max, endpoints included.
std::vector<double> default_lambda_grid(double lambda_max_value, int points = 100,
                                        double decades = 2.0);

/// Solves the grid in descending order, warm-starting each level from the
/// previous solution.
PathResult solve_path(const PriceRelativeMatrix& data, const UtilitySpec& utility,
                      const std::vector<double>& grid, const SolverConfig& cfg);

/// Picks the path solution that best uses a cardinality budget: the largest
/// support not exceeding `max_assets` (ties resolved toward the largest
/// lambda). With `min_assets` set, instead the largest-lambda solution whose
/// support reaches the floor. When nothing qualifies the closest solution is
/// returned with `satisfied == false`.
PathSelection select_by_cardinality(const PathResult& path, int max_assets,
                                    std::optional<int> min_assets = std::nullopt);

}  // namespace spo
