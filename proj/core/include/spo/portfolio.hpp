#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "spo/data.hpp"
#include "spo/solver.hpp"
#include "spo/weights.hpp"

namespace spo {

PortfolioWeights equally_weighted(int num_assets);

Eigen::VectorXd sample_mean(const PriceRelativeMatrix& train);
Eigen::MatrixXd sample_covariance(const PriceRelativeMatrix& train);  // unbiased

struct BenchmarkSolution {
  PortfolioWeights weights;
  bool converged = true;
  int iterations = 0;
  double kkt_residual = 0.0;
};

/// Global minimum variance allocation: min w' Cov w over the simplex.
BenchmarkSolution gmv_from_covariance(const Eigen::MatrixXd& cov);
BenchmarkSolution gmv_sample(const PriceRelativeMatrix& train);

/// Mean-variance allocation: min -w'mu + lambda_mv w' Cov w over the simplex.
BenchmarkSolution mv_from_moments(const Eigen::VectorXd& mu, const Eigen::MatrixXd& cov,
                                  double lambda_mv);
BenchmarkSolution mv_sample(const PriceRelativeMatrix& train, double lambda_mv);

/// Walk-forward folds: the latter part of [0, n_rows) is cut into k equal
/// validation blocks, each trained on everything strictly before it.
struct CvSplit {
  RowRange train;
  RowRange validation;
};
std::vector<CvSplit> time_series_folds(int n_rows, int k);

struct CvOutcome {
  int chosen = 0;                  // grid index with the best mean score
  std::vector<double> mean_scores; // per grid entry
};

/// Scores every grid entry on each fold via `fold_scores` (folds may run in
/// parallel; results are deterministic) and picks the entry with the highest
/// mean validation score. Ties resolve to the earliest grid entry.
CvOutcome time_series_cv(int n_rows, int k, int grid_size,
                         const std::function<std::vector<double>(const CvSplit&)>& fold_scores,
                         int threads = 1);

/// Net of transaction costs: each period pays fee_rate * l1 turnover plus
/// activity_fee per touched asset, applied to the gross growth factor.
/// Holdings before the first period are zero, so the initial purchase is
/// charged. Throws DataError on misaligned inputs.
std::vector<double> net_returns(const std::vector<double>& gross,
                                const std::vector<Eigen::VectorXd>& holdings,
                                double fee_rate, double activity_fee);

struct Metrics {
  double accumulated_excess = 0.0;  // compounded returns net of the risk-free leg
  double accumulated_total = 0.0;   // compounded raw returns
  double max_drawdown = 0.0;        // on the raw wealth curve, in [0, 1]
  std::optional<double> sharpe;     // annualized; absent when volatility is zero
  std::optional<double> sortino;    // annualized; absent when downside is zero
};

Metrics compute_metrics(const std::vector<double>& returns,
                        const std::vector<double>& risk_free, int periods_per_year);

enum class StrategyKind { SaaLog, SaaExp, EquallyWeighted, GlobalMinVariance, MeanVariance };

struct StrategySpec {
  StrategyKind kind = StrategyKind::SaaLog;
  double aversion = 1.0;               // exponential utility only
  std::optional<double> eta_override;  // default: smallest training relative (log)
};

struct BacktestConfig {
  int train_window = 120;
  int hold_window = 63;
  int cv_folds = 5;
  int grid_points = 100;
  double grid_decades = 2.0;
  double fee_rate = 0.001;      // c; set both to zero to report gross == net
  double activity_fee = 1e-5;   // c'
  std::optional<int> cardinality;  // pick the path solution with <= s assets
  std::optional<int> min_assets;   // after CV, walk the path down to >= n_min
  double clip_q = 0.0;             // 0 disables winsorizing the training inputs
  std::optional<FactorKind> factor;
  int mv_grid_points = 100;
  double mv_log_lo = -3.0;
  double mv_log_hi = 2.0;
  SolverConfig cv_solver = SolverConfig::cross_validation();
  SolverConfig final_solver = SolverConfig::final_fit();
  int threads = 1;
};

struct RebalanceRecord {
  int row = 0;
  std::string date;
  std::vector<int> asset_ids;    // panel column indices with nonzero weight
  std::vector<double> weights;   // aligned with asset_ids
  int support = 0;
  double chosen_param = std::numeric_limits<double>::quiet_NaN();
  bool degenerate = false;
  std::string warning;           // nonempty when the period was skipped or flagged
};

struct BacktestReport {
  std::vector<std::string> dates;
  std::vector<double> gross;
  std::vector<double> net;
  std::vector<double> risk_free;
  bool risk_free_assumed_zero = true;
  std::vector<RebalanceRecord> rebalances;
  double avg_num_assets = 0.0;
  Metrics gross_metrics;
  Metrics net_metrics;
  int periods_per_year_used = 252;
  std::vector<std::string> warnings;
};

/// Rolling-window evaluation: at each rebalance the universe is filtered on
/// the trailing window, hyperparameters are selected by walk-forward CV, the
/// allocation is held fixed to the next rebalance, and gross/net series are
/// recorded. Holdings never depend on data at or after the rebalance row.
BacktestReport backtest(const MarketPanel& panel, const StrategySpec& strategy,
                        const BacktestConfig& config,
                        const std::vector<double>* risk_free = nullptr);

}  // namespace spo
