#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "spo/errors.hpp"
#include "spo/portfolio.hpp"
#include "spo/simplex_qp.hpp"
#include "support/oracles.hpp"

using spo::BacktestConfig;
using spo::MarketPanel;
using spo::PriceRelativeMatrix;
using spo::StrategyKind;
using spo::StrategySpec;
using spo::UtilitySpec;

namespace {

// independent sort-and-shift projection used as a KKT oracle
Eigen::VectorXd reference_projection(const Eigen::VectorXd& v) {
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0;
  double tau = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    css += u[k];
    const double cand = (css - 1.0) / static_cast<double>(k + 1);
    if (u[k] - cand > 0.0) tau = cand;
  }
  Eigen::VectorXd w = v;
  for (Eigen::Index j = 0; j < w.size(); ++j) w[j] = std::max(v[j] - tau, 0.0);
  return w;
}

MarketPanel small_market(std::uint64_t seed, int n, int d) {
  spo::SynthSpec spec;
  spec.seed = seed;
  spec.periods = n;
  spec.assets = d;
  spec.vol_first = 0.01;
  spec.vol_last = 0.03;
  spec.drift_first = 0.0005;
  spec.drift_last = 0.0001;
  return spo::synthesize_market(spec);
}

}  // namespace

TEST_CASE("equally weighted allocations") {
  const auto ew4 = spo::equally_weighted(4);
  for (int j = 0; j < 4; ++j) CHECK(ew4.weights[j] == 0.25);
  CHECK(spo::equally_weighted(1).weights[0] == 1.0);
  for (int d : {1, 2, 3, 5, 7, 16, 19}) {
    CHECK(spo::equally_weighted(d).weights.sum() == 1.0);
  }
  CHECK_THROWS_AS(spo::equally_weighted(0), std::invalid_argument);
}

TEST_CASE("simplex projection agrees with the reference") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> gauss;
  for (int rep = 0; rep < 200; ++rep) {
    Eigen::VectorXd v(1 + static_cast<int>(rng() % 8));
    for (Eigen::Index j = 0; j < v.size(); ++j) v[j] = gauss(rng);
    const Eigen::VectorXd w = spo::project_to_simplex(v);
    CHECK((w - reference_projection(v)).lpNorm<Eigen::Infinity>() < 1e-12);
    CHECK(w.minCoeff() >= 0.0);
    CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("gmv: identity covariance gives equal weights") {
  const auto sol = spo::gmv_from_covariance(Eigen::MatrixXd::Identity(5, 5));
  REQUIRE(sol.converged);
  for (int j = 0; j < 5; ++j) CHECK(sol.weights.weights[j] == doctest::Approx(0.2).epsilon(1e-8));
}

TEST_CASE("gmv: diag(1,4) splits 0.8 / 0.2") {
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(2, 2);
  cov(0, 0) = 1.0;
  cov(1, 1) = 4.0;
  const auto sol = spo::gmv_from_covariance(cov);
  REQUIRE(sol.converged);
  CHECK(sol.weights.weights[0] == doctest::Approx(0.8).epsilon(1e-6));
  CHECK(sol.weights.weights[1] == doctest::Approx(0.2).epsilon(1e-6));
}

TEST_CASE("gmv matches a brute-force simplex scan on three assets") {
  Eigen::MatrixXd cov(3, 3);
  cov << 2.0, 0.3, 0.0, 0.3, 1.0, 0.2, 0.0, 0.2, 1.5;
  const auto sol = spo::gmv_from_covariance(cov);
  REQUIRE(sol.converged);

  const double h = 5e-4;
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_w(3);
  for (double w0 = 0.0; w0 <= 1.0 + 1e-12; w0 += h) {
    for (double w1 = 0.0; w1 + w0 <= 1.0 + 1e-12; w1 += h) {
      Eigen::Vector3d w(w0, w1, 1.0 - w0 - w1);
      const double f = w.dot(cov * w);
      if (f < best) {
        best = f;
        best_w = w;
      }
    }
  }
  const double f_sol = sol.weights.weights.dot(cov * sol.weights.weights);
  CHECK(std::abs(f_sol - best) <= 1e-6);
  CHECK((sol.weights.weights - best_w).lpNorm<Eigen::Infinity>() <= 2.0 * h);
}

TEST_CASE("mv solutions") {
  // identity covariance: w = proj(mu / (2 lambda))
  Eigen::VectorXd mu(3);
  mu << 0.3, 0.1, -0.2;
  for (double lambda : {0.5, 1.0, 4.0}) {
    const auto sol = spo::mv_from_moments(mu, Eigen::MatrixXd::Identity(3, 3), lambda);
    REQUIRE(sol.converged);
    const Eigen::VectorXd expected = reference_projection(mu / (2.0 * lambda));
    CHECK((sol.weights.weights - expected).lpNorm<Eigen::Infinity>() < 1e-7);
  }

  // huge risk aversion approaches the gmv allocation
  Eigen::MatrixXd cov(2, 2);
  cov << 1.0, 0.2, 0.2, 2.0;
  const auto gmv = spo::gmv_from_covariance(cov);
  const auto mv = spo::mv_from_moments(Eigen::Vector2d(1.05, 1.10), cov, 1e6);
  CHECK((mv.weights.weights - gmv.weights.weights).lpNorm<Eigen::Infinity>() < 1e-3);

  // one asset takes everything
  Eigen::MatrixXd one = Eigen::MatrixXd::Constant(1, 1, 0.5);
  CHECK(spo::mv_from_moments(Eigen::VectorXd::Constant(1, 1.0), one, 2.0).weights.weights[0] ==
        1.0);
  CHECK_THROWS_AS(spo::mv_from_moments(mu, Eigen::MatrixXd::Identity(3, 3), 0.0),
                  std::invalid_argument);
}

TEST_CASE("walk-forward folds cover the tail with strictly prior training") {
  const auto folds = spo::time_series_folds(100, 5);
  REQUIRE(folds.size() == 5);
  // blocks of 16 over the last 80 rows
  int expected_begin = 20;
  for (const auto& fold : folds) {
    CHECK(fold.validation.begin == expected_begin);
    CHECK(fold.validation.end == expected_begin + 16);
    CHECK(fold.train.begin == 0);
    CHECK(fold.train.end == fold.validation.begin);
    expected_begin += 16;
  }
  CHECK(folds.back().validation.end == 100);
  CHECK_THROWS_AS(spo::time_series_folds(5, 5), std::invalid_argument);
}

TEST_CASE("cv picks the best mean score with first-index ties") {
  const auto constant = [&](const spo::CvSplit&) { return std::vector<double>{1.0, 1.0, 1.0}; };
  CHECK(spo::time_series_cv(60, 5, 3, constant).chosen == 0);

  const auto rising = [&](const spo::CvSplit&) { return std::vector<double>{0.1, 0.7, 0.3}; };
  CHECK(spo::time_series_cv(60, 5, 3, rising).chosen == 1);

  const auto single = [&](const spo::CvSplit&) { return std::vector<double>{-2.0}; };
  CHECK(spo::time_series_cv(60, 5, 1, single).chosen == 0);

  // parallel fold evaluation returns the same pick
  CHECK(spo::time_series_cv(60, 5, 3, rising, 4).chosen == 1);
}

TEST_CASE("net returns follow the fee formula") {
  // no rebalance: net equals gross
  std::vector<Eigen::VectorXd> holdings(3, Eigen::VectorXd::Zero(2));
  holdings[0] << 0.5, 0.5;
  holdings[1] << 0.5, 0.5;
  holdings[2] << 0.5, 0.5;
  const std::vector<double> gross{0.0, 0.01, 0.02};
  const auto net = spo::net_returns(gross, holdings, 0.001, 0.00001);
  // first period buys in: fees on the full l1 plus two touched assets
  CHECK(net[0] == doctest::Approx((1.0 - 0.001 - 2e-5) - 1.0).epsilon(1e-12));
  CHECK(net[1] == doctest::Approx(0.01).epsilon(1e-12));

  // the pinned rebalancing example: (0.5, 0.5) -> (1, 0) at r = 0
  std::vector<Eigen::VectorXd> h2(2, Eigen::VectorXd::Zero(2));
  h2[0] << 0.5, 0.5;
  h2[1] << 1.0, 0.0;
  const auto net2 = spo::net_returns({0.0, 0.0}, h2, 0.001, 0.00001);
  CHECK(net2[1] == doctest::Approx(-0.00102).epsilon(1e-10));

  // zero fees collapse net onto gross
  const auto net3 = spo::net_returns(gross, holdings, 0.0, 0.0);
  CHECK(net3 == gross);

  CHECK_THROWS_AS(spo::net_returns({0.1}, holdings, 0.0, 0.0), spo::DataError);
}

TEST_CASE("metrics: drawdown, sharpe, sortino") {
  const std::vector<double> rf0{0.0, 0.0};
  // wealth 1 -> 1.1 -> 0.99
  const auto m = spo::compute_metrics({0.1, -0.1}, rf0, 252);
  CHECK(m.max_drawdown == doctest::Approx((1.1 - 0.99) / 1.1).epsilon(1e-12));
  CHECK(m.accumulated_total == doctest::Approx(-0.01).epsilon(1e-12));

  const auto up = spo::compute_metrics({0.01, 0.0, 0.02}, {0.0, 0.0, 0.0}, 252);
  CHECK(up.max_drawdown == 0.0);

  // alternating excess cancels the mean
  const auto flat = spo::compute_metrics({0.02, -0.02, 0.02, -0.02},
                                         {0.0, 0.0, 0.0, 0.0}, 252);
  REQUIRE(flat.sharpe.has_value());
  CHECK(*flat.sharpe == doctest::Approx(0.0).epsilon(1e-12));

  // zero volatility leaves the ratio undefined rather than infinite
  const auto constant = spo::compute_metrics({0.01, 0.01}, rf0, 252);
  CHECK_FALSE(constant.sharpe.has_value());
  CHECK_FALSE(constant.sortino.has_value());  // no downside either

  CHECK_THROWS_AS(spo::compute_metrics({}, {}, 252), std::invalid_argument);
  CHECK_THROWS_AS(spo::compute_metrics({0.1}, {}, 252), spo::DataError);
}

TEST_CASE("single-asset backtests track the asset itself") {
  const MarketPanel p = small_market(41, 60, 1);
  BacktestConfig cfg;
  cfg.train_window = 20;
  cfg.hold_window = 10;
  cfg.fee_rate = 0.0;
  cfg.activity_fee = 0.0;
  StrategySpec ew{StrategyKind::EquallyWeighted};
  const auto report = spo::backtest(p, ew, cfg);
  REQUIRE(report.gross.size() == 40);
  for (int i = 0; i < 40; ++i) {
    CHECK(report.gross[static_cast<std::size_t>(i)] == p.returns(20 + i, 0));
    CHECK(report.net[static_cast<std::size_t>(i)] ==
          doctest::Approx(report.gross[static_cast<std::size_t>(i)]).epsilon(1e-15));
  }
  CHECK(report.avg_num_assets == 1.0);
}

TEST_CASE("equally weighted backtest matches an arithmetic replay") {
  const MarketPanel p = small_market(42, 70, 4);
  BacktestConfig cfg;
  cfg.train_window = 20;
  cfg.hold_window = 15;
  StrategySpec ew{StrategyKind::EquallyWeighted};
  const auto report = spo::backtest(p, ew, cfg);

  // independent replay
  std::vector<double> expected;
  for (int t = 20; t < 70; t += 15) {
    const int end = std::min(t + 15, 70);
    for (int i = t; i < end; ++i) {
      double g = 0.0;
      for (int j = 0; j < 4; ++j) g += 0.25 * p.returns(i, j);
      expected.push_back(g);
    }
  }
  REQUIRE(report.gross.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(report.gross[i] == doctest::Approx(expected[i]).epsilon(1e-12));
  }

  // metrics are recomputable from the stored series bit for bit
  const auto again =
      spo::compute_metrics(report.gross, report.risk_free, report.periods_per_year_used);
  CHECK(again.accumulated_excess == report.gross_metrics.accumulated_excess);
  CHECK(again.max_drawdown == report.gross_metrics.max_drawdown);

  // fees push net strictly under gross whenever weights move
  CHECK(report.net[0] < report.gross[0]);
}

TEST_CASE("backtests are deterministic and stay on the simplex") {
  const MarketPanel p = small_market(43, 90, 6);
  BacktestConfig cfg;
  cfg.train_window = 30;
  cfg.hold_window = 20;
  cfg.grid_points = 12;
  cfg.cv_folds = 4;
  cfg.threads = 3;
  StrategySpec log_strategy{StrategyKind::SaaLog};
  const auto a = spo::backtest(p, log_strategy, cfg);
  const auto b = spo::backtest(p, log_strategy, cfg);
  CHECK(a.gross == b.gross);
  CHECK(a.net == b.net);
  REQUIRE(a.rebalances.size() == b.rebalances.size());
  for (std::size_t r = 0; r < a.rebalances.size(); ++r) {
    CHECK(a.rebalances[r].weights == b.rebalances[r].weights);
    double total = 0.0;
    for (double w : a.rebalances[r].weights) {
      CHECK(w >= 0.0);
      total += w;
    }
    if (!a.rebalances[r].degenerate && a.rebalances[r].warning.empty()) {
      CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("holdings never depend on data at or after the rebalance row") {
  const MarketPanel base = small_market(44, 80, 5);
  BacktestConfig cfg;
  cfg.train_window = 25;
  cfg.hold_window = 15;
  cfg.grid_points = 10;
  cfg.cv_folds = 3;
  StrategySpec log_strategy{StrategyKind::SaaLog};
  const auto ref = spo::backtest(base, log_strategy, cfg);

  // first rebalance happens at row 25; mutate everything from there on
  MarketPanel mutated = base;
  for (int i = 25; i < 80; ++i) {
    for (int j = 0; j < 5; ++j) {
      mutated.returns(i, j) = (i + j) % 2 == 0 ? 0.004 : -0.003;
    }
  }
  const auto other = spo::backtest(mutated, log_strategy, cfg);
  REQUIRE(!ref.rebalances.empty());
  CHECK(ref.rebalances[0].asset_ids == other.rebalances[0].asset_ids);
  CHECK(ref.rebalances[0].weights == other.rebalances[0].weights);
}

TEST_CASE("strategy coverage: gmv, mv and exp run end to end") {
  const MarketPanel p = small_market(45, 70, 5);
  BacktestConfig cfg;
  cfg.train_window = 24;
  cfg.hold_window = 23;
  cfg.cv_folds = 3;
  cfg.grid_points = 8;
  cfg.mv_grid_points = 8;

  for (StrategySpec s : {StrategySpec{StrategyKind::GlobalMinVariance},
                         StrategySpec{StrategyKind::MeanVariance},
                         StrategySpec{StrategyKind::SaaExp, 1.0}}) {
    const auto report = spo::backtest(p, s, cfg);
    CHECK(report.gross.size() == 46);
    CHECK(report.rebalances.size() == 2);
    for (const auto& rec : report.rebalances) {
      if (rec.warning.empty() && !rec.degenerate) {
        double total = 0.0;
        for (double w : rec.weights) total += w;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("cardinality cap and asset floor act through the path") {
  const MarketPanel p = small_market(48, 90, 8);
  BacktestConfig cfg;
  cfg.train_window = 40;
  cfg.hold_window = 50;
  cfg.grid_points = 20;
  cfg.cv_folds = 3;
  cfg.cardinality = 2;
  StrategySpec log_strategy{StrategyKind::SaaLog};
  const auto capped = spo::backtest(p, log_strategy, cfg);
  for (const auto& rec : capped.rebalances) {
    CHECK(rec.support <= 2);
  }

  BacktestConfig floor_cfg = cfg;
  floor_cfg.cardinality.reset();
  floor_cfg.min_assets = 3;
  const auto floored = spo::backtest(p, log_strategy, floor_cfg);
  for (const auto& rec : floored.rebalances) {
    if (rec.warning.empty()) CHECK(rec.support >= 3);
  }

  BacktestConfig both = floor_cfg;
  both.cardinality = 2;
  CHECK_THROWS_AS(spo::backtest(p, log_strategy, both), std::invalid_argument);
}

TEST_CASE("factor mode trains on factor inputs but evaluates realized returns") {
  const MarketPanel p = small_market(49, 120, 5);
  BacktestConfig cfg;
  cfg.train_window = 40;
  cfg.hold_window = 40;
  cfg.cv_folds = 3;
  cfg.grid_points = 8;
  cfg.factor = spo::FactorKind::RelativeStrength;
  StrategySpec log_strategy{StrategyKind::SaaLog};
  const auto report = spo::backtest(p, log_strategy, cfg);
  CHECK(report.gross.size() == 80);

  // gross returns are a convex combination of realized asset returns
  for (std::size_t i = 0; i < report.gross.size(); ++i) {
    double lo = 0.0, hi = 0.0;
    const int row = 40 + static_cast<int>(i);
    for (int j = 0; j < 5; ++j) {
      lo = std::min(lo, p.returns(row, j));
      hi = std::max(hi, p.returns(row, j));
    }
    CHECK(report.gross[i] >= lo - 1e-12);
    CHECK(report.gross[i] <= hi + 1e-12);
  }
}

TEST_CASE("risk-free series feeds the excess metrics") {
  const MarketPanel p = small_market(50, 40, 3);
  BacktestConfig cfg;
  cfg.train_window = 20;
  cfg.hold_window = 20;
  StrategySpec ew{StrategyKind::EquallyWeighted};
  std::vector<double> rf(40, 0.0001);
  const auto with_rf = spo::backtest(p, ew, cfg, &rf);
  CHECK_FALSE(with_rf.risk_free_assumed_zero);
  const auto without = spo::backtest(p, ew, cfg);
  CHECK(without.risk_free_assumed_zero);
  CHECK(with_rf.gross_metrics.accumulated_excess <
        without.gross_metrics.accumulated_excess);

  std::vector<double> short_rf(10, 0.0);
  CHECK_THROWS_AS(spo::backtest(p, ew, cfg, &short_rf), spo::DataError);
}
