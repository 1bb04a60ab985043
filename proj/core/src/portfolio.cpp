#include "spo/portfolio.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

#include "spo/errors.hpp"
#include "spo/objective.hpp"
#include "spo/simplex_qp.hpp"

namespace spo {

namespace {

PriceRelativeMatrix sub_rows(const PriceRelativeMatrix& X, RowRange range) {
  return PriceRelativeMatrix::unchecked(
      X.values().middleRows(range.begin, range.size()));
}

double sample_variance(const std::vector<double>& xs) {
  const std::size_t m = xs.size();
  if (m < 2) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(m);
  double ss = 0.0;
  for (double x : xs) {
    const double dev = x - mean;
    ss += dev * dev;
  }
  return ss / static_cast<double>(m - 1);
}

void run_folds(int count, int threads,
               const std::function<void(int)>& body) {
  if (threads <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  const int workers = std::min(threads, count);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
}

}  // namespace

PortfolioWeights equally_weighted(int num_assets) {
  if (num_assets < 1) {
    throw std::invalid_argument("equally_weighted: need at least one asset");
  }
  return PortfolioWeights::from_vector(
      Eigen::VectorXd::Constant(num_assets, 1.0 / static_cast<double>(num_assets)));
}

Eigen::VectorXd sample_mean(const PriceRelativeMatrix& train) {
  return train.values().colwise().mean();
}

Eigen::MatrixXd sample_covariance(const PriceRelativeMatrix& train) {
  const Eigen::Index n = train.periods();
  if (n < 2) {
    throw std::invalid_argument("sample_covariance: need at least two periods");
  }
  const Eigen::MatrixXd centered =
      train.values().rowwise() - train.values().colwise().mean();
  return centered.transpose() * centered / static_cast<double>(n - 1);
}

BenchmarkSolution gmv_from_covariance(const Eigen::MatrixXd& cov) {
  const QpResult qp = minimize_quadratic_on_simplex(
      cov, Eigen::VectorXd::Zero(cov.rows()));
  return {PortfolioWeights::from_vector(qp.w), qp.converged, qp.iterations,
          qp.kkt_residual};
}

BenchmarkSolution gmv_sample(const PriceRelativeMatrix& train) {
  return gmv_from_covariance(sample_covariance(train));
}

BenchmarkSolution mv_from_moments(const Eigen::VectorXd& mu, const Eigen::MatrixXd& cov,
                                  double lambda_mv) {
  if (!(lambda_mv > 0.0)) {
    throw std::invalid_argument("mv: lambda_mv must be > 0");
  }
  const QpResult qp = minimize_quadratic_on_simplex(lambda_mv * cov, -mu);
  return {PortfolioWeights::from_vector(qp.w), qp.converged, qp.iterations,
          qp.kkt_residual};
}

BenchmarkSolution mv_sample(const PriceRelativeMatrix& train, double lambda_mv) {
  return mv_from_moments(sample_mean(train), sample_covariance(train), lambda_mv);
}

std::vector<CvSplit> time_series_folds(int n_rows, int k) {
  if (k < 1) {
    throw std::invalid_argument("time_series_folds: need k >= 1");
  }
  const int block = n_rows / (k + 1);
  if (block < 1) {
    throw std::invalid_argument("time_series_folds: window too short for " +
                                std::to_string(k) + " folds");
  }
  std::vector<CvSplit> folds;
  folds.reserve(static_cast<std::size_t>(k));
  for (int f = 0; f < k; ++f) {
    const int begin = n_rows - (k - f) * block;
    const int end = n_rows - (k - f - 1) * block;
    folds.push_back({RowRange{0, begin}, RowRange{begin, end}});
  }
  return folds;
}

CvOutcome time_series_cv(int n_rows, int k, int grid_size,
                         const std::function<std::vector<double>(const CvSplit&)>& fold_scores,
                         int threads) {
  if (grid_size < 1) {
    throw std::invalid_argument("time_series_cv: empty grid");
  }
  const std::vector<CvSplit> folds = time_series_folds(n_rows, k);
  std::vector<std::vector<double>> scores(folds.size());
  run_folds(static_cast<int>(folds.size()), threads, [&](int f) {
    scores[static_cast<std::size_t>(f)] = fold_scores(folds[static_cast<std::size_t>(f)]);
    if (scores[static_cast<std::size_t>(f)].size() != static_cast<std::size_t>(grid_size)) {
      throw std::logic_error("time_series_cv: scorer returned wrong grid size");
    }
  });

  CvOutcome out;
  out.mean_scores.assign(static_cast<std::size_t>(grid_size), 0.0);
  for (const auto& fold : scores) {
    for (int g = 0; g < grid_size; ++g) {
      out.mean_scores[static_cast<std::size_t>(g)] += fold[static_cast<std::size_t>(g)];
    }
  }
  for (double& s : out.mean_scores) s /= static_cast<double>(folds.size());
  out.chosen = 0;
  for (int g = 1; g < grid_size; ++g) {
    if (out.mean_scores[static_cast<std::size_t>(g)] >
        out.mean_scores[static_cast<std::size_t>(out.chosen)]) {
      out.chosen = g;
    }
  }
  return out;
}

std::vector<double> net_returns(const std::vector<double>& gross,
                                const std::vector<Eigen::VectorXd>& holdings,
                                double fee_rate, double activity_fee) {
  if (gross.size() != holdings.size()) {
    throw DataError("net_returns: gross and holdings series have different lengths");
  }
  std::vector<double> net(gross.size());
  if (gross.empty()) return net;
  Eigen::VectorXd prev = Eigen::VectorXd::Zero(holdings.front().size());
  for (std::size_t t = 0; t < gross.size(); ++t) {
    const Eigen::VectorXd& cur = holdings[t];
    if (cur.size() != prev.size()) {
      throw DataError("net_returns: holdings dimension changed mid-series");
    }
    double turnover = 0.0;
    long long touched = 0;
    for (Eigen::Index j = 0; j < cur.size(); ++j) {
      const double diff = cur[j] - prev[j];
      turnover += std::abs(diff);
      if (cur[j] != prev[j]) ++touched;
    }
    net[t] = (1.0 - fee_rate * turnover - activity_fee * static_cast<double>(touched)) *
                 (1.0 + gross[t]) -
             1.0;
    prev = cur;
  }
  return net;
}

Metrics compute_metrics(const std::vector<double>& returns,
                        const std::vector<double>& risk_free, int periods_per_year) {
  if (returns.empty()) {
    throw std::invalid_argument("compute_metrics: empty return series");
  }
  if (risk_free.size() != returns.size()) {
    throw DataError("compute_metrics: risk-free series length mismatch");
  }
  Metrics m;
  double wealth = 1.0;
  double peak = 1.0;
  double excess_wealth = 1.0;
  double mean_excess = 0.0;
  for (std::size_t t = 0; t < returns.size(); ++t) {
    wealth *= 1.0 + returns[t];
    peak = std::max(peak, wealth);
    m.max_drawdown = std::max(m.max_drawdown, (peak - wealth) / peak);
    const double e = returns[t] - risk_free[t];
    excess_wealth *= 1.0 + e;
    mean_excess += e;
  }
  const auto T = static_cast<double>(returns.size());
  m.accumulated_total = wealth - 1.0;
  m.accumulated_excess = excess_wealth - 1.0;
  mean_excess /= T;

  double ss = 0.0;
  double downside = 0.0;
  for (std::size_t t = 0; t < returns.size(); ++t) {
    const double e = returns[t] - risk_free[t];
    const double dev = e - mean_excess;
    ss += dev * dev;
    const double neg = std::min(e, 0.0);
    downside += neg * neg;
  }
  const double root_ppy = std::sqrt(static_cast<double>(periods_per_year));
  if (returns.size() >= 2) {
    const double sd = std::sqrt(ss / (T - 1.0));
    if (sd > 0.0) m.sharpe = mean_excess / sd * root_ppy;
  }
  const double downside_dev = std::sqrt(downside / T);
  if (downside_dev > 0.0) m.sortino = mean_excess / downside_dev * root_ppy;
  return m;
}

namespace {

struct RebalanceDecision {
  Eigen::VectorXd weights;  // over the subset, on the simplex (or zero)
  double chosen_param = std::numeric_limits<double>::quiet_NaN();
  bool degenerate = false;
  std::string warning;
};

std::vector<double> mv_lambda_grid(const BacktestConfig& cfg) {
  std::vector<double> grid(static_cast<std::size_t>(cfg.mv_grid_points));
  if (cfg.mv_grid_points == 1) {
    grid[0] = std::pow(10.0, cfg.mv_log_hi);
    return grid;
  }
  for (int i = 0; i < cfg.mv_grid_points; ++i) {
    const double t = static_cast<double>(i) / (cfg.mv_grid_points - 1);
    // descending: strongest regularization first
    grid[static_cast<std::size_t>(i)] =
        std::pow(10.0, cfg.mv_log_hi + t * (cfg.mv_log_lo - cfg.mv_log_hi));
  }
  return grid;
}

RebalanceDecision decide_mv(const PriceRelativeMatrix& X_train,
                            const BacktestConfig& cfg) {
  const std::vector<double> grid = mv_lambda_grid(cfg);
  const int rows = static_cast<int>(X_train.periods());
  const auto fold_scores = [&](const CvSplit& split) {
    const PriceRelativeMatrix fold_train = sub_rows(X_train, split.train);
    const Eigen::VectorXd mu = sample_mean(fold_train);
    const Eigen::MatrixXd cov = sample_covariance(fold_train);
    std::vector<double> scores(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const Eigen::VectorXd w = mv_from_moments(mu, cov, grid[g]).weights.weights;
      std::vector<double> port;
      port.reserve(static_cast<std::size_t>(split.validation.size()));
      for (int i = split.validation.begin; i < split.validation.end; ++i) {
        port.push_back(X_train.values().row(i).dot(w) - 1.0);
      }
      double mean = 0.0;
      for (double p : port) mean += p;
      mean /= static_cast<double>(port.size());
      scores[g] = mean - grid[g] * sample_variance(port);
    }
    return scores;
  };
  const CvOutcome cv = time_series_cv(rows, cfg.cv_folds, static_cast<int>(grid.size()),
                                      fold_scores, cfg.threads);

  RebalanceDecision out;
  out.chosen_param = grid[static_cast<std::size_t>(cv.chosen)];
  BenchmarkSolution sol = mv_sample(X_train, out.chosen_param);
  if (!sol.converged) out.warning = "mv solve stopped before tolerance";
  out.weights = sol.weights.weights;
  return out;
}

RebalanceDecision decide_saa(const PriceRelativeMatrix& X_train,
                             const StrategySpec& strategy, const BacktestConfig& cfg) {
  UtilitySpec utility;
  if (strategy.kind == StrategyKind::SaaLog) {
    utility = UtilitySpec::logarithmic(
        strategy.eta_override ? *strategy.eta_override : X_train.min_entry());
  } else {
    utility = UtilitySpec::exponential(strategy.aversion,
                                       strategy.eta_override ? *strategy.eta_override : 0.0);
  }
  const double lmax = lambda_max(X_train, utility);
  const std::vector<double> grid =
      default_lambda_grid(lmax, cfg.grid_points, cfg.grid_decades);

  RebalanceDecision out;

  if (cfg.cardinality) {
    const PathResult path = solve_path(X_train, utility, grid, cfg.final_solver);
    const PathSelection sel = select_by_cardinality(path, *cfg.cardinality);
    const SolveResult& chosen = path.results[static_cast<std::size_t>(sel.index)];
    out.chosen_param = sel.lambda;
    out.weights = chosen.weights.weights;
    out.degenerate = chosen.degenerate;
    if (!sel.satisfied) out.warning = "no path solution met the cardinality budget";
    return out;
  }

  const int rows = static_cast<int>(X_train.periods());
  const auto fold_scores = [&](const CvSplit& split) {
    const PriceRelativeMatrix fold_train = sub_rows(X_train, split.train);
    const PathResult path = solve_path(fold_train, utility, grid, cfg.cv_solver);
    std::vector<double> scores(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const Eigen::VectorXd& w = path.results[g].weights.weights;
      double acc = 0.0;
      for (int i = split.validation.begin; i < split.validation.end; ++i) {
        acc += utility_value(utility, X_train.values().row(i).dot(w));
      }
      scores[g] = acc / static_cast<double>(split.validation.size());
    }
    return scores;
  };
  const CvOutcome cv = time_series_cv(rows, cfg.cv_folds, static_cast<int>(grid.size()),
                                      fold_scores, cfg.threads);

  int chosen_idx = cv.chosen;
  Problem problem(X_train, utility, grid[static_cast<std::size_t>(chosen_idx)]);
  SolveResult fit = solve(problem, cfg.final_solver);

  if (cfg.min_assets && fit.support_size() < *cfg.min_assets) {
    // walk toward weaker regularization until the floor is met
    SolveResult best = fit;
    int best_idx = chosen_idx;
    bool satisfied = false;
    Eigen::VectorXd warm = fit.weights_raw;
    for (std::size_t g = static_cast<std::size_t>(chosen_idx) + 1; g < grid.size(); ++g) {
      SolveResult r = solve(problem.with_lambda(grid[g]), cfg.final_solver, &warm);
      warm = r.weights_raw;
      const int support = r.support_size();
      if (support >= *cfg.min_assets) {
        fit = std::move(r);
        chosen_idx = static_cast<int>(g);
        satisfied = true;
        break;
      }
      if (support > best.support_size()) {
        best = std::move(r);
        best_idx = static_cast<int>(g);
      }
    }
    if (!satisfied) {
      fit = std::move(best);
      chosen_idx = best_idx;
      out.warning = "asset floor unmet on the path; closest support used";
    }
  }

  out.chosen_param = grid[static_cast<std::size_t>(chosen_idx)];
  out.weights = fit.weights.weights;
  out.degenerate = fit.degenerate;
  if (fit.degenerate && out.warning.empty()) {
    out.warning = "degenerate all-zero solution; holding cash";
  }
  return out;
}

}  // namespace

BacktestReport backtest(const MarketPanel& panel, const StrategySpec& strategy,
                        const BacktestConfig& config,
                        const std::vector<double>* risk_free) {
  const int n = static_cast<int>(panel.num_periods());
  const int d_total = static_cast<int>(panel.num_assets());
  if (config.train_window < 1 || config.hold_window < 1) {
    throw std::invalid_argument("backtest: windows must be >= 1");
  }
  if (n < config.train_window + config.hold_window) {
    throw std::invalid_argument("backtest: panel shorter than train + hold window");
  }
  if (config.cardinality && config.min_assets) {
    throw std::invalid_argument("backtest: cardinality cap and asset floor are exclusive");
  }
  if (risk_free && static_cast<int>(risk_free->size()) != n) {
    throw DataError("backtest: risk-free series length mismatch");
  }

  std::optional<FactorPanel> factor;
  if (config.factor) {
    if (*config.factor == FactorKind::RelativeStrength) {
      if (!panel.has_prices) {
        throw DataError("backtest: relative-strength factor needs open/close prices");
      }
      factor = factor_rsi(panel);
    } else {
      factor = factor_sr(panel);
    }
  }

  BacktestReport report;
  report.risk_free_assumed_zero = risk_free == nullptr;
  if (report.risk_free_assumed_zero) {
    report.warnings.push_back("risk-free series absent; excess returns assume rf = 0");
  }
  std::vector<Eigen::VectorXd> holdings_by_period;

  for (int t = config.train_window; t < n; t += config.hold_window) {
    const int hold_end = std::min(t + config.hold_window, n);
    RebalanceRecord rec;
    rec.row = t;
    rec.date = panel.dates[static_cast<std::size_t>(t)];

    std::vector<int> subset = filter_universe(panel, t - 1, config.train_window);
    const RowRange window{t - config.train_window, t};
    if (factor) {
      std::vector<int> kept;
      for (int j : subset) {
        bool complete = true;
        for (int i = window.begin; i < window.end; ++i) {
          if (!factor->available(i, j)) {
            complete = false;
            break;
          }
        }
        if (complete) kept.push_back(j);
      }
      subset = std::move(kept);
    }

    Eigen::VectorXd local_w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(subset.size()));
    if (subset.empty()) {
      rec.warning = "empty universe; period skipped";
    } else {
      PriceRelativeMatrix X_train =
          factor ? factor_model_inputs(*factor, subset, window)
                 : to_price_relatives(panel, subset, window);
      if (config.clip_q > 0.0) {
        X_train = clip_quantiles(X_train, config.clip_q);
      }

      RebalanceDecision decision;
      switch (strategy.kind) {
        case StrategyKind::EquallyWeighted:
          decision.weights = equally_weighted(static_cast<int>(subset.size())).weights;
          break;
        case StrategyKind::GlobalMinVariance: {
          BenchmarkSolution sol = gmv_sample(X_train);
          if (!sol.converged) decision.warning = "gmv solve stopped before tolerance";
          decision.weights = sol.weights.weights;
          break;
        }
        case StrategyKind::MeanVariance:
          decision = decide_mv(X_train, config);
          break;
        case StrategyKind::SaaLog:
        case StrategyKind::SaaExp:
          decision = decide_saa(X_train, strategy, config);
          break;
      }
      local_w = std::move(decision.weights);
      rec.chosen_param = decision.chosen_param;
      rec.degenerate = decision.degenerate;
      rec.warning = decision.warning;
    }

    Eigen::VectorXd full_w = Eigen::VectorXd::Zero(d_total);
    for (std::size_t k = 0; k < subset.size(); ++k) {
      const double wk = local_w[static_cast<Eigen::Index>(k)];
      full_w[subset[k]] = wk;
      if (wk > 0.0) {
        rec.asset_ids.push_back(subset[k]);
        rec.weights.push_back(wk);
      }
    }
    rec.support = static_cast<int>(rec.asset_ids.size());
    if (!rec.warning.empty()) {
      report.warnings.push_back(rec.date + ": " + rec.warning);
    }
    report.rebalances.push_back(rec);

    for (int i = t; i < hold_end; ++i) {
      double g = 0.0;
      for (std::size_t k = 0; k < subset.size(); ++k) {
        const int j = subset[k];
        if (panel.available(i, j)) {
          g += local_w[static_cast<Eigen::Index>(k)] * panel.returns(i, j);
        }
      }
      report.dates.push_back(panel.dates[static_cast<std::size_t>(i)]);
      report.gross.push_back(g);
      report.risk_free.push_back(risk_free ? (*risk_free)[static_cast<std::size_t>(i)] : 0.0);
      holdings_by_period.push_back(full_w);
    }
  }

  report.net = net_returns(report.gross, holdings_by_period, config.fee_rate,
                           config.activity_fee);
  report.periods_per_year_used = periods_per_year(panel.frequency);
  report.gross_metrics =
      compute_metrics(report.gross, report.risk_free, report.periods_per_year_used);
  report.net_metrics =
      compute_metrics(report.net, report.risk_free, report.periods_per_year_used);
  double support_sum = 0.0;
  for (const RebalanceRecord& rec : report.rebalances) {
    support_sum += static_cast<double>(rec.support);
  }
  report.avg_num_assets =
      report.rebalances.empty() ? 0.0
                                : support_sum / static_cast<double>(report.rebalances.size());
  return report;
}

}  // namespace spo
