#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include <zlib.h>

#include "spo/data.hpp"
#include "spo/errors.hpp"
#include "support/oracles.hpp"

using spo::MarketPanel;
using spo::PanelFormat;
using spo::RowRange;

namespace {

std::filesystem::path fresh_dir(const std::string& tag) {
  static std::mt19937_64 rng(std::random_device{}());
  const auto dir = std::filesystem::temp_directory_path() /
                   ("spo_test_" + tag + "_" + std::to_string(rng()));
  std::filesystem::create_directories(dir);
  return dir;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

const std::string kLongCsv =
    "date,ticker,open,close,return\n"
    "2020-01-01,AAA,10,10.5,0.05\n"
    "2020-01-01,BBB,20,20,0.0\n"
    "2020-01-02,AAA,10.5,10.8,0.02\n"
    "2020-01-02,BBB,20,19,-0.05\n";

}  // namespace

TEST_CASE("long csv round trips a 2x2 panel") {
  const auto dir = fresh_dir("long");
  write_file(dir / "panel.csv", kLongCsv);
  const MarketPanel p = spo::load_panel((dir / "panel.csv").string(), PanelFormat::LongCsv);
  CHECK(p.num_periods() == 2);
  CHECK(p.num_assets() == 2);
  CHECK(p.tickers == std::vector<std::string>{"AAA", "BBB"});
  CHECK(p.returns(0, 0) == 0.05);
  CHECK(p.returns(1, 1) == -0.05);
  CHECK(p.open(0, 1) == 20.0);
  CHECK(p.available.all());
  CHECK(p.has_prices);
  CHECK(p.row_of_date("2020-01-02") == 1);
  CHECK(p.row_of_date("2019-12-31") == -1);
}

TEST_CASE("missing cells are masked; duplicates and bad values reject") {
  const auto dir = fresh_dir("longedge");
  write_file(dir / "missing.csv",
             "date,ticker,open,close,return\n"
             "2020-01-01,AAA,,,0.05\n"
             "2020-01-02,AAA,,,\n"
             "2020-01-02,BBB,,,0.01\n");
  const MarketPanel p =
      spo::load_panel((dir / "missing.csv").string(), PanelFormat::LongCsv);
  CHECK(p.available(0, 0));
  CHECK_FALSE(p.available(1, 0));  // empty return column
  CHECK_FALSE(p.available(0, 1));  // no row at all

  write_file(dir / "dup.csv",
             "date,ticker,open,close,return\n"
             "2020-01-01,AAA,,,0.05\n"
             "2020-01-01,AAA,,,0.06\n");
  CHECK_THROWS_AS(spo::load_panel((dir / "dup.csv").string(), PanelFormat::LongCsv),
                  spo::DataError);

  write_file(dir / "badnum.csv",
             "date,ticker,open,close,return\n"
             "2020-01-01,AAA,,,zazzle\n");
  CHECK_THROWS_AS(spo::load_panel((dir / "badnum.csv").string(), PanelFormat::LongCsv),
                  spo::DataError);

  write_file(dir / "dead.csv",
             "date,ticker,open,close,return\n"
             "2020-01-01,AAA,,,-1.0\n");
  CHECK_THROWS_AS(spo::load_panel((dir / "dead.csv").string(), PanelFormat::LongCsv),
                  spo::DataError);

  CHECK_THROWS_AS(spo::load_panel((dir / "nope.csv").string(), PanelFormat::LongCsv),
                  spo::DataError);
}

TEST_CASE("gzip compressed long csv loads transparently") {
  const auto dir = fresh_dir("gz");
  const auto path = dir / "panel.csv.gz";
  gzFile f = gzopen(path.c_str(), "wb");
  REQUIRE(f != nullptr);
  gzwrite(f, kLongCsv.data(), static_cast<unsigned>(kLongCsv.size()));
  gzclose(f);
  const MarketPanel p = spo::load_panel(path.string(), PanelFormat::LongCsv);
  CHECK(p.num_periods() == 2);
  CHECK(p.returns(0, 0) == 0.05);
}

TEST_CASE("wide csv directory loads and validates its grid") {
  const auto dir = fresh_dir("wide");
  write_file(dir / "returns.csv",
             "date,AAA,BBB\n"
             "2020-01-01,0.05,0.0\n"
             "2020-01-02,0.02,\n");
  write_file(dir / "open.csv",
             "date,AAA,BBB\n"
             "2020-01-01,10,20\n"
             "2020-01-02,10.5,20\n");
  write_file(dir / "close.csv",
             "date,AAA,BBB\n"
             "2020-01-01,10.5,20\n"
             "2020-01-02,10.8,19\n");
  const MarketPanel p = spo::load_panel(dir.string(), PanelFormat::WideCsv);
  CHECK(p.num_periods() == 2);
  CHECK(p.num_assets() == 2);
  CHECK(p.available(0, 1));
  CHECK_FALSE(p.available(1, 1));
  CHECK(p.has_prices);

  write_file(dir / "open.csv",
             "date,AAA,CCC\n"
             "2020-01-01,10,20\n"
             "2020-01-02,10.5,20\n");
  CHECK_THROWS_AS(spo::load_panel(dir.string(), PanelFormat::WideCsv), spo::DataError);

  const auto empty_dir = fresh_dir("wide_empty");
  CHECK_THROWS_AS(spo::load_panel(empty_dir.string(), PanelFormat::WideCsv),
                  spo::DataError);
}

TEST_CASE("filter_universe keeps only complete histories") {
  spo::SynthSpec spec;
  spec.seed = 4;
  spec.periods = 10;
  spec.assets = 3;
  MarketPanel p = spo::synthesize_market(spec);

  CHECK(spo::filter_universe(p, 9, 10) == std::vector<int>{0, 1, 2});

  p.available(7, 1) = false;  // in-window gap excludes the ticker
  CHECK(spo::filter_universe(p, 9, 5) == std::vector<int>{0, 2});
  // gaps before the window do not matter
  p.available(0, 2) = false;
  CHECK(spo::filter_universe(p, 9, 5) == std::vector<int>{0, 2});

  CHECK_THROWS_AS(spo::filter_universe(p, 9, 11), std::invalid_argument);
  CHECK_THROWS_AS(spo::filter_universe(p, 20, 2), std::invalid_argument);
}

TEST_CASE("price relatives are one plus returns and reject dead assets") {
  spo::SynthSpec spec;
  spec.seed = 9;
  spec.periods = 6;
  spec.assets = 2;
  MarketPanel p = spo::synthesize_market(spec);
  p.returns(0, 0) = 0.0;
  p.returns(1, 0) = 0.05;
  const spo::PriceRelativeMatrix X = spo::to_price_relatives(p, {0, 1}, RowRange{0, 6});
  CHECK(X.values()(0, 0) == 1.0);
  CHECK(X.values()(1, 0) == 1.05);

  p.returns(2, 1) = -1.0;  // zero relative
  CHECK_THROWS_AS(spo::to_price_relatives(p, {0, 1}, RowRange{0, 6}), spo::DataError);
  p.returns(2, 1) = 0.0;
  p.available(3, 1) = false;
  CHECK_THROWS_AS(spo::to_price_relatives(p, {0, 1}, RowRange{0, 6}), spo::DataError);
}

TEST_CASE("quantile clipping matches an order-statistic reference and is idempotent") {
  // pooled values 1..100
  Eigen::MatrixXd M(10, 10);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) M(i, j) = 1.0 + i * 10 + j;
  const auto X = spo::PriceRelativeMatrix::validated(M);
  const auto clipped = spo::clip_quantiles(X, 0.025);

  // independent reference: sorted pooled values, floor/ceil order statistics
  std::vector<double> pooled(M.data(), M.data() + M.size());
  std::sort(pooled.begin(), pooled.end());
  const double lo = pooled[static_cast<std::size_t>(std::floor(0.025 * 99.0))];
  const double hi = pooled[static_cast<std::size_t>(std::ceil(0.975 * 99.0))];
  CHECK(lo == 3.0);
  CHECK(hi == 98.0);
  CHECK(clipped.values().minCoeff() == lo);
  CHECK(clipped.values().maxCoeff() == hi);
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      const double expected = std::min(std::max(M(i, j), lo), hi);
      CHECK(clipped.values()(i, j) == expected);
    }
  }

  const auto twice = spo::clip_quantiles(clipped, 0.025);
  CHECK(twice.values() == clipped.values());

  // a vanishing clip level leaves distinct entries alone
  const auto gentle = spo::clip_quantiles(X, 1e-9);
  CHECK(gentle.values() == M);

  CHECK_THROWS_AS(spo::clip_quantiles(X, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(spo::clip_quantiles(X, 0.5), std::invalid_argument);
}

namespace {

MarketPanel panel_with_difs(const std::vector<double>& difs) {
  MarketPanel p;
  const int n = static_cast<int>(difs.size());
  p.dates.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) p.dates[static_cast<std::size_t>(i)] = "d" + std::to_string(i);
  p.tickers = {"AAA"};
  p.open = Eigen::MatrixXd::Constant(n, 1, 10.0);
  p.close = p.open + Eigen::Map<const Eigen::VectorXd>(difs.data(), n);
  p.returns = Eigen::MatrixXd::Zero(n, 1);
  p.available = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, 1, true);
  p.has_prices = true;
  return p;
}

}  // namespace

TEST_CASE("relative strength factor follows the smoothing recursion") {
  // all positive moves saturate at 1; all negative at 0
  const auto up = spo::factor_rsi(panel_with_difs({1.0, 2.0, 0.5}));
  CHECK(up.values(2, 0) == doctest::Approx(1.0));
  const auto down = spo::factor_rsi(panel_with_difs({-1.0, -2.0, -0.5}));
  CHECK(down.values(2, 0) == doctest::Approx(0.0));

  // two-step recursion by hand: m1 = x1, m2 = a x2 + (1-a) m1
  const double a = 1.0 / 24;
  const auto mixed = spo::factor_rsi(panel_with_difs({1.0, -1.0}), a);
  const double pos2 = a * 0.0 + (1.0 - a) * 1.0;
  const double abs2 = a * 1.0 + (1.0 - a) * 1.0;
  CHECK(mixed.values(1, 0) == doctest::Approx(pos2 / abs2));
  CHECK(mixed.values(1, 0) == doctest::Approx(23.0 / 24.0));

  // no movement at all: neutral and flagged
  const auto flat = spo::factor_rsi(panel_with_difs({0.0, 0.0}));
  CHECK(flat.values(1, 0) == 0.5);
  CHECK(flat.flagged(1, 0));

  // values stay inside [0, 1]
  spo::SynthSpec spec;
  spec.seed = 12;
  spec.periods = 200;
  spec.assets = 4;
  const auto rsi = spo::factor_rsi(spo::synthesize_market(spec));
  for (int i = 0; i < 200; ++i)
    for (int j = 0; j < 4; ++j)
      if (rsi.available(i, j)) {
        CHECK(rsi.values(i, j) >= 0.0);
        CHECK(rsi.values(i, j) <= 1.0);
      }
}

TEST_CASE("sharpe factor matches a direct two-pass oracle") {
  spo::SynthSpec spec;
  spec.seed = 31;
  spec.periods = 120;
  spec.assets = 3;
  const MarketPanel p = spo::synthesize_market(spec);
  const int W = 10;
  const auto factor = spo::factor_sr(p, W, W);

  // leading entries are masked until both windows fill
  for (int i = 0; i < 2 * W - 2; ++i) CHECK_FALSE(factor.available(i, 0));
  CHECK(factor.available(2 * W - 2, 0));

  // direct recomputation
  for (int j = 0; j < 3; ++j) {
    for (int i = 2 * W - 2; i < 120; ++i) {
      double avg = 0.0;
      for (int s = i - W + 1; s <= i; ++s) {
        double mean = 0.0;
        for (int k = s - W + 1; k <= s; ++k) mean += p.returns(k, j);
        mean /= W;
        double ss = 0.0;
        for (int k = s - W + 1; k <= s; ++k) {
          const double dev = p.returns(k, j) - mean;
          ss += dev * dev;
        }
        avg += mean / std::sqrt(ss / (W - 1));
      }
      avg /= W;
      CHECK(factor.values(i, j) == doctest::Approx(avg).epsilon(1e-12));
    }
  }

  // constant returns have zero dispersion: flagged zero
  MarketPanel flat = p;
  flat.returns.col(0).setConstant(0.01);
  const auto fflat = spo::factor_sr(flat, W, W);
  CHECK(fflat.values(2 * W - 2, 0) == 0.0);
  CHECK(fflat.flagged(2 * W - 2, 0));
}

TEST_CASE("factors never look ahead") {
  spo::SynthSpec spec;
  spec.seed = 77;
  spec.periods = 80;
  spec.assets = 3;
  const MarketPanel base = spo::synthesize_market(spec);
  MarketPanel mutated = base;
  const int t = 40;
  for (int i = t + 1; i < 80; ++i) {
    for (int j = 0; j < 3; ++j) {
      mutated.returns(i, j) = 0.123;
      mutated.open(i, j) = 1.0;
      mutated.close(i, j) = 2.0;
    }
  }
  const auto rsi_a = spo::factor_rsi(base);
  const auto rsi_b = spo::factor_rsi(mutated);
  const auto sr_a = spo::factor_sr(base, 8, 8);
  const auto sr_b = spo::factor_sr(mutated, 8, 8);
  for (int i = 0; i <= t; ++i) {
    for (int j = 0; j < 3; ++j) {
      CHECK(rsi_a.values(i, j) == rsi_b.values(i, j));
      CHECK(sr_a.available(i, j) == sr_b.available(i, j));
      if (sr_a.available(i, j)) CHECK(sr_a.values(i, j) == sr_b.values(i, j));
    }
  }
}

TEST_CASE("factor model inputs standardize each period cross-sectionally") {
  spo::SynthSpec spec;
  spec.seed = 5;
  spec.periods = 60;
  spec.assets = 5;
  const MarketPanel p = spo::synthesize_market(spec);
  const auto factor = spo::factor_rsi(p);
  const std::vector<int> subset{0, 1, 2, 3, 4};
  const RowRange window{10, 40};
  CHECK(spo::factor_complete_rows(factor, subset, window).size() == 30);

  const auto inputs = spo::factor_model_inputs(factor, subset, window, 0.01);
  CHECK(inputs.periods() == 30);
  CHECK(inputs.assets() == 5);
  CHECK(inputs.min_entry() >= 0.01);
  for (int i = 0; i < 30; ++i) {
    const double mean = inputs.values().row(i).mean();
    // unfloored rows re-center at one
    if (inputs.values().row(i).minCoeff() > 0.011) {
      CHECK(mean == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("synthetic markets are deterministic with ordered volatility") {
  spo::SynthSpec spec;
  spec.seed = 2024;
  spec.periods = 10000;
  spec.assets = 5;
  spec.vol_first = 0.005;
  spec.vol_last = 0.05;
  const MarketPanel a = spo::synthesize_market(spec);
  const MarketPanel b = spo::synthesize_market(spec);
  CHECK(a.returns == b.returns);
  CHECK(a.open == b.open);
  CHECK(a.dates == b.dates);

  // column dispersion tracks the requested volatilities
  Eigen::VectorXd sd(5);
  for (int j = 0; j < 5; ++j) {
    const double mean = a.returns.col(j).mean();
    sd[j] = std::sqrt((a.returns.col(j).array() - mean).square().sum() / 9999.0);
  }
  for (int j = 1; j < 5; ++j) CHECK(sd[j] > sd[j - 1]);

  spo::SynthSpec flat = spec;
  flat.periods = 20;
  flat.vol_first = flat.vol_last = 0.0;
  flat.drift_first = flat.drift_last = 0.01;
  const MarketPanel c = spo::synthesize_market(flat);
  CHECK(c.returns.maxCoeff() == doctest::Approx(c.returns.minCoeff()));

  // relatives are strictly positive and reload exactly through the csv path
  CHECK((1.0 + a.returns.array() > 0.0).all());
}

TEST_CASE("a synthetic panel survives a csv round trip bit for bit") {
  spo::SynthSpec spec;
  spec.seed = 3;
  spec.periods = 8;
  spec.assets = 3;
  const MarketPanel p = spo::synthesize_market(spec);

  const auto dir = fresh_dir("roundtrip");
  std::string csv = "date,ticker,open,close,return\n";
  char buf[64];
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 3; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", p.open(i, j));
      csv += p.dates[static_cast<std::size_t>(i)] + "," +
             p.tickers[static_cast<std::size_t>(j)] + "," + buf;
      std::snprintf(buf, sizeof(buf), ",%.17g", p.close(i, j));
      csv += buf;
      std::snprintf(buf, sizeof(buf), ",%.17g\n", p.returns(i, j));
      csv += buf;
    }
  }
  write_file(dir / "panel.csv", csv);
  const MarketPanel q = spo::load_panel((dir / "panel.csv").string(), PanelFormat::LongCsv);
  CHECK(q.returns == p.returns);
  CHECK(q.open == p.open);
  CHECK(q.close == p.close);

  const auto Xp = spo::to_price_relatives(p, {0, 1, 2}, RowRange{0, 8});
  const auto Xq = spo::to_price_relatives(q, {0, 1, 2}, RowRange{0, 8});
  CHECK(Xp.values() == Xq.values());
}
