// spo: sparse portfolio selection toolkit
//
// Subcommands:
//   solve            one l1-regularized fit on a data panel
//   path             regularization path with warm starts
//   backtest         rolling-window evaluation with benchmark strategies
//   bench-screening  matched screened/unscreened solves over a lambda grid
//
// Configuration comes from an optional flat JSON file (--config) overridden
// by command-line flags; every run writes the effective config next to its
// artifacts so it can be reproduced bit for bit.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spo/data.hpp"
#include "spo/errors.hpp"
#include "spo/objective.hpp"
#include "spo/portfolio.hpp"
#include "spo/report_io.hpp"
#include "spo/solver.hpp"

namespace {

using nlohmann::json;

struct RunConfig {
  std::string command;

  // data
  std::string data;
  std::string format = "long";
  std::string frequency = "daily";
  std::string rf;

  // synthetic fallback when no data file is given
  int synth_n = 0;
  int synth_d = 0;
  double synth_vol_min = 0.01;
  double synth_vol_max = 0.04;
  double synth_drift_min = 0.0;
  double synth_drift_max = 0.0;
  int synth_block = 1;
  double synth_corr = 0.0;
  std::uint64_t seed = 1;

  // utility
  std::string utility = "log";
  double eta = -1.0;  // < 0: smallest training relative (log) / 0 (exp)
  double aversion = 1.0;

  // solver
  double lambda = 0.0;
  double lambda_ratio = 0.0;  // fraction of lambda_max, alternative to --lambda
  int grid_points = 100;
  double grid_decades = 2.0;
  double tol = 1e-8;
  int max_iter = 100000;
  int screen_every = 30;
  bool accelerate = false;

  // backtest
  std::string strategy = "LOG";
  int train_window = 120;
  int hold_window = 63;
  int cv_folds = 5;
  double cv_tol = 1e-5;
  int cv_max_iter = 10000;
  bool fees = false;
  double fee_rate = 0.001;
  double activity_fee = 1e-5;
  int cardinality = 0;  // 0: unset
  int n_min = 0;        // 0: unset
  std::string factor = "none";
  double clip = 0.0;

  // bench-screening
  int bench_points = 7;
  double bench_decades = 3.0;

  std::string out = "spo_out";
  int threads = 1;
};

json config_to_json(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  j["data"] = c.data;
  j["format"] = c.format;
  j["frequency"] = c.frequency;
  j["rf"] = c.rf;
  j["synth_n"] = c.synth_n;
  j["synth_d"] = c.synth_d;
  j["synth_vol_min"] = c.synth_vol_min;
  j["synth_vol_max"] = c.synth_vol_max;
  j["synth_drift_min"] = c.synth_drift_min;
  j["synth_drift_max"] = c.synth_drift_max;
  j["synth_block"] = c.synth_block;
  j["synth_corr"] = c.synth_corr;
  j["seed"] = c.seed;
  j["utility"] = c.utility;
  j["eta"] = c.eta;
  j["aversion"] = c.aversion;
  j["lambda"] = c.lambda;
  j["lambda_ratio"] = c.lambda_ratio;
  j["grid_points"] = c.grid_points;
  j["grid_decades"] = c.grid_decades;
  j["tol"] = c.tol;
  j["max_iter"] = c.max_iter;
  j["screen_every"] = c.screen_every;
  j["accelerate"] = c.accelerate;
  j["strategy"] = c.strategy;
  j["train_window"] = c.train_window;
  j["hold_window"] = c.hold_window;
  j["cv_folds"] = c.cv_folds;
  j["cv_tol"] = c.cv_tol;
  j["cv_max_iter"] = c.cv_max_iter;
  j["fees"] = c.fees;
  j["fee_rate"] = c.fee_rate;
  j["activity_fee"] = c.activity_fee;
  j["cardinality"] = c.cardinality;
  j["n_min"] = c.n_min;
  j["factor"] = c.factor;
  j["clip"] = c.clip;
  j["bench_points"] = c.bench_points;
  j["bench_decades"] = c.bench_decades;
  j["out"] = c.out;
  j["threads"] = c.threads;
  return j;
}

template <typename T>
void read_key(const json& j, const char* key, T& into) {
  if (j.contains(key)) into = j.at(key).get<T>();
}

void config_from_json(const json& j, RunConfig& c) {
  const json reference = config_to_json(c);
  for (const auto& item : j.items()) {
    if (item.key() != "command" && !reference.contains(item.key())) {
      std::cerr << "warning: ignoring unknown config key '" << item.key() << "'\n";
    }
  }
  read_key(j, "data", c.data);
  read_key(j, "format", c.format);
  read_key(j, "frequency", c.frequency);
  read_key(j, "rf", c.rf);
  read_key(j, "synth_n", c.synth_n);
  read_key(j, "synth_d", c.synth_d);
  read_key(j, "synth_vol_min", c.synth_vol_min);
  read_key(j, "synth_vol_max", c.synth_vol_max);
  read_key(j, "synth_drift_min", c.synth_drift_min);
  read_key(j, "synth_drift_max", c.synth_drift_max);
  read_key(j, "synth_block", c.synth_block);
  read_key(j, "synth_corr", c.synth_corr);
  read_key(j, "seed", c.seed);
  read_key(j, "utility", c.utility);
  read_key(j, "eta", c.eta);
  read_key(j, "aversion", c.aversion);
  read_key(j, "lambda", c.lambda);
  read_key(j, "lambda_ratio", c.lambda_ratio);
  read_key(j, "grid_points", c.grid_points);
  read_key(j, "grid_decades", c.grid_decades);
  read_key(j, "tol", c.tol);
  read_key(j, "max_iter", c.max_iter);
  read_key(j, "screen_every", c.screen_every);
  read_key(j, "accelerate", c.accelerate);
  read_key(j, "strategy", c.strategy);
  read_key(j, "train_window", c.train_window);
  read_key(j, "hold_window", c.hold_window);
  read_key(j, "cv_folds", c.cv_folds);
  read_key(j, "cv_tol", c.cv_tol);
  read_key(j, "cv_max_iter", c.cv_max_iter);
  read_key(j, "fees", c.fees);
  read_key(j, "fee_rate", c.fee_rate);
  read_key(j, "activity_fee", c.activity_fee);
  read_key(j, "cardinality", c.cardinality);
  read_key(j, "n_min", c.n_min);
  read_key(j, "factor", c.factor);
  read_key(j, "clip", c.clip);
  read_key(j, "bench_points", c.bench_points);
  read_key(j, "bench_decades", c.bench_decades);
  read_key(j, "out", c.out);
  read_key(j, "threads", c.threads);
}

spo::Frequency parse_frequency(const std::string& s) {
  if (s == "daily") return spo::Frequency::Daily;
  if (s == "monthly") return spo::Frequency::Monthly;
  if (s == "quarterly") return spo::Frequency::Quarterly;
  throw spo::ConfigError("unknown frequency '" + s + "'");
}

spo::PanelFormat parse_format(const std::string& s) {
  if (s == "long") return spo::PanelFormat::LongCsv;
  if (s == "wide") return spo::PanelFormat::WideCsv;
  throw spo::ConfigError("unknown data format '" + s + "'");
}

spo::MarketPanel load_market(const RunConfig& cfg) {
  if (!cfg.data.empty()) {
    return spo::load_panel(cfg.data, parse_format(cfg.format), parse_frequency(cfg.frequency));
  }
  if (cfg.synth_n > 0 && cfg.synth_d > 0) {
    spo::SynthSpec spec;
    spec.seed = cfg.seed;
    spec.periods = cfg.synth_n;
    spec.assets = cfg.synth_d;
    spec.vol_first = cfg.synth_vol_min;
    spec.vol_last = cfg.synth_vol_max;
    spec.drift_first = cfg.synth_drift_min;
    spec.drift_last = cfg.synth_drift_max;
    spec.block_size = cfg.synth_block;
    spec.block_corr = cfg.synth_corr;
    spec.frequency = parse_frequency(cfg.frequency);
    return spo::synthesize_market(spec);
  }
  throw spo::ConfigError("no --data file and no synthetic panel size given");
}

spo::UtilitySpec build_utility(const RunConfig& cfg, double min_relative) {
  if (cfg.utility == "log") {
    return spo::UtilitySpec::logarithmic(cfg.eta >= 0.0 ? cfg.eta : min_relative);
  }
  if (cfg.utility == "exp") {
    return spo::UtilitySpec::exponential(cfg.aversion, cfg.eta >= 0.0 ? cfg.eta : 0.0);
  }
  throw spo::ConfigError("unknown utility '" + cfg.utility + "' (expected log|exp)");
}

spo::SolverConfig build_solver(const RunConfig& cfg) {
  spo::SolverConfig s;
  s.max_iter = cfg.max_iter;
  s.tol = cfg.tol;
  s.screen_every = cfg.screen_every;
  s.accelerate = cfg.accelerate;
  return s;
}

spo::StrategySpec parse_strategy(const RunConfig& cfg) {
  spo::StrategySpec s;
  if (cfg.strategy == "LOG") {
    s.kind = spo::StrategyKind::SaaLog;
  } else if (cfg.strategy == "EXP") {
    s.kind = spo::StrategyKind::SaaExp;
    s.aversion = cfg.aversion;
  } else if (cfg.strategy == "EW") {
    s.kind = spo::StrategyKind::EquallyWeighted;
  } else if (cfg.strategy == "GMV-P") {
    s.kind = spo::StrategyKind::GlobalMinVariance;
  } else if (cfg.strategy == "MV-P") {
    s.kind = spo::StrategyKind::MeanVariance;
  } else {
    throw spo::ConfigError("unknown strategy '" + cfg.strategy +
                           "' (expected LOG|EXP|EW|GMV-P|MV-P)");
  }
  if (cfg.eta >= 0.0) s.eta_override = cfg.eta;
  return s;
}

std::optional<spo::FactorKind> parse_factor(const std::string& s) {
  if (s == "none" || s.empty()) return std::nullopt;
  if (s == "sr") return spo::FactorKind::SharpeMovingAverage;
  if (s == "rsi") return spo::FactorKind::RelativeStrength;
  throw spo::ConfigError("unknown factor '" + s + "' (expected sr|rsi|none)");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw spo::DataError("cannot write " + path.string());
  }
  out << text;
}

std::filesystem::path prepare_out_dir(const RunConfig& cfg) {
  const std::filesystem::path dir(cfg.out);
  std::filesystem::create_directories(dir);
  write_text(dir / "run_config.json", config_to_json(cfg).dump(2) + "\n");
  return dir;
}

struct ModelData {
  spo::PriceRelativeMatrix matrix;
  std::vector<std::string> tickers;
};

// full-history matrix: tickers with complete records over every period
ModelData build_model_matrix(const RunConfig& cfg, const spo::MarketPanel& panel) {
  const int n = static_cast<int>(panel.num_periods());
  const std::vector<int> subset = spo::filter_universe(panel, n - 1, n);
  if (subset.empty()) {
    throw spo::DataError("no ticker has complete records over the panel");
  }
  spo::PriceRelativeMatrix X =
      spo::to_price_relatives(panel, subset, spo::RowRange{0, n});
  if (cfg.clip > 0.0) X = spo::clip_quantiles(X, cfg.clip);
  ModelData out{std::move(X), {}};
  out.tickers.reserve(subset.size());
  for (int j : subset) out.tickers.push_back(panel.tickers[static_cast<std::size_t>(j)]);
  return out;
}

json counters_json(const spo::OpCounters& c) {
  json j;
  j["grad_coordinates"] = c.grad_coordinates;
  j["prox_coordinates"] = c.prox_coordinates;
  j["dual_evaluations"] = c.dual_evaluations;
  j["screen_coordinates"] = c.screen_coordinates;
  return j;
}

std::string gap_trace_csv(const spo::SolveResult& r) {
  std::string out = "iteration,gap,primal,screened\n";
  for (const spo::TracePoint& pt : r.trace) {
    out += std::to_string(pt.iteration) + ',' + spo::format_double(pt.gap) + ',' +
           spo::format_double(pt.primal) + ',' + std::to_string(pt.screened) + '\n';
  }
  return out;
}

int cmd_solve(const RunConfig& cfg) {
  const spo::MarketPanel panel = load_market(cfg);
  const ModelData model = build_model_matrix(cfg, panel);
  const spo::UtilitySpec utility = build_utility(cfg, model.matrix.min_entry());
  const double lmax = spo::lambda_max(model.matrix, utility);
  double lambda = cfg.lambda;
  if (lambda <= 0.0 && cfg.lambda_ratio > 0.0) lambda = cfg.lambda_ratio * lmax;
  if (lambda <= 0.0) {
    throw spo::ConfigError("solve needs --lambda or --lambda-ratio");
  }

  const spo::Problem problem(model.matrix, utility, lambda);
  const spo::SolveResult r = spo::solve(problem, build_solver(cfg));

  const auto dir = prepare_out_dir(cfg);
  std::string weights = "index,ticker,weight_raw,weight\n";
  for (int j : r.weights.support) {
    weights += std::to_string(j) + ',' + model.tickers[static_cast<std::size_t>(j)] + ',' +
               spo::format_double(r.weights_raw[j]) + ',' +
               spo::format_double(r.weights.weights[j]) + '\n';
  }
  write_text(dir / "weights.csv", weights);
  write_text(dir / "gap_trace.csv", gap_trace_csv(r));

  json summary;
  summary["command"] = "solve";
  summary["lambda"] = lambda;
  summary["lambda_max"] = lmax;
  summary["eta"] = utility.eta;
  summary["iterations"] = r.iterations;
  summary["converged"] = r.converged;
  summary["gap"] = r.gap;
  summary["support_size"] = r.support_size();
  summary["degenerate"] = r.degenerate;
  summary["assets"] = model.matrix.assets();
  summary["periods"] = model.matrix.periods();
  summary["counters"] = counters_json(r.counters);
  summary["config"] = config_to_json(cfg);
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  return 0;
}

int cmd_path(const RunConfig& cfg) {
  const spo::MarketPanel panel = load_market(cfg);
  const ModelData model = build_model_matrix(cfg, panel);
  const spo::UtilitySpec utility = build_utility(cfg, model.matrix.min_entry());
  const double lmax = spo::lambda_max(model.matrix, utility);
  const std::vector<double> grid =
      spo::default_lambda_grid(lmax, cfg.grid_points, cfg.grid_decades);
  const spo::PathResult path =
      spo::solve_path(model.matrix, utility, grid, build_solver(cfg));

  const auto dir = prepare_out_dir(cfg);
  std::string rows = "lambda,support,gap,objective,iterations,converged\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const spo::SolveResult& r = path.results[i];
    const double objective = r.trace.empty() ? 0.0 : r.trace.back().primal;
    rows += spo::format_double(grid[i]) + ',' + std::to_string(path.support_sizes[i]) +
            ',' + spo::format_double(r.gap) + ',' + spo::format_double(objective) + ',' +
            std::to_string(r.iterations) + ',' + (r.converged ? "1" : "0") + '\n';
  }
  write_text(dir / "path.csv", rows);

  json summary;
  summary["command"] = "path";
  summary["lambda_max"] = lmax;
  summary["grid_first"] = grid.front();
  summary["grid_last"] = grid.back();
  summary["grid_points"] = grid.size();
  summary["eta"] = utility.eta;
  summary["support_monotonicity_violations"] = path.support_monotonicity_violations;
  summary["config"] = config_to_json(cfg);
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  return 0;
}

std::vector<double> load_risk_free(const RunConfig& cfg, const spo::MarketPanel& panel) {
  std::vector<double> rf;
  if (cfg.rf.empty()) return rf;
  std::ifstream in(cfg.rf);
  if (!in) throw spo::DataError("cannot open " + cfg.rf);
  std::string line;
  std::getline(in, line);  // header: date,rf
  rf.assign(panel.dates.size(), 0.0);
  std::size_t filled = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw spo::DataError(cfg.rf + ": malformed line");
    const int row = panel.row_of_date(line.substr(0, comma));
    if (row >= 0) {
      rf[static_cast<std::size_t>(row)] = std::stod(line.substr(comma + 1));
      ++filled;
    }
  }
  if (filled == 0) throw spo::DataError(cfg.rf + ": no dates matched the panel");
  return rf;
}

int cmd_backtest(const RunConfig& cfg) {
  const spo::MarketPanel panel = load_market(cfg);
  const spo::StrategySpec strategy = parse_strategy(cfg);

  spo::BacktestConfig bt;
  bt.train_window = cfg.train_window;
  bt.hold_window = cfg.hold_window;
  bt.cv_folds = cfg.cv_folds;
  bt.grid_points = cfg.grid_points;
  bt.grid_decades = cfg.grid_decades;
  bt.fee_rate = cfg.fees ? cfg.fee_rate : 0.0;
  bt.activity_fee = cfg.fees ? cfg.activity_fee : 0.0;
  if (cfg.cardinality > 0) bt.cardinality = cfg.cardinality;
  if (cfg.n_min > 0) bt.min_assets = cfg.n_min;
  bt.clip_q = cfg.clip;
  bt.factor = parse_factor(cfg.factor);
  bt.threads = cfg.threads;
  bt.cv_solver = spo::SolverConfig::cross_validation();
  bt.cv_solver.tol = cfg.cv_tol;
  bt.cv_solver.max_iter = cfg.cv_max_iter;
  bt.cv_solver.screen_every = cfg.screen_every;
  bt.final_solver = build_solver(cfg);

  const std::vector<double> rf = load_risk_free(cfg, panel);
  const spo::BacktestReport report =
      spo::backtest(panel, strategy, bt, rf.empty() ? nullptr : &rf);

  const auto dir = prepare_out_dir(cfg);
  write_text(dir / "report.json",
             spo::backtest_summary_json(report, config_to_json(cfg).dump()));
  write_text(dir / "returns.csv", spo::backtest_returns_csv(report));
  write_text(dir / "holdings.csv", spo::backtest_holdings_csv(report, panel.tickers));
  return 0;
}

int cmd_bench_screening(const RunConfig& cfg) {
  const spo::MarketPanel panel = load_market(cfg);
  RunConfig model_cfg = cfg;
  const ModelData model = build_model_matrix(model_cfg, panel);
  const spo::UtilitySpec utility = build_utility(cfg, model.matrix.min_entry());
  const double lmax = spo::lambda_max(model.matrix, utility);

  std::vector<double> ratios(static_cast<std::size_t>(cfg.bench_points));
  for (int i = 0; i < cfg.bench_points; ++i) {
    const double t = cfg.bench_points == 1
                         ? 0.0
                         : static_cast<double>(i) / (cfg.bench_points - 1);
    ratios[static_cast<std::size_t>(i)] = std::pow(10.0, -cfg.bench_decades * t);
  }

  spo::SolverConfig screened_cfg = build_solver(cfg);
  spo::SolverConfig unscreened_cfg = screened_cfg;
  unscreened_cfg.screening = false;

  std::string rows =
      "lambda,lambda_ratio,iters_screened,iters_unscreened,"
      "grad_coords_screened,grad_coords_unscreened,grad_ratio,final_screened\n";
  std::string timing = "lambda_ratio,seconds_screened,seconds_unscreened,time_ratio\n";
  std::string heat = "lambda_ratio,iteration,screened_fraction\n";
  std::string traces = "lambda_ratio,variant,iteration,gap,seconds\n";

  const double d_total = static_cast<double>(model.matrix.assets());
  for (double ratio : ratios) {
    const spo::Problem problem(model.matrix, utility, ratio * lmax);

    const auto t0 = std::chrono::steady_clock::now();
    const spo::SolveResult rs = spo::solve(problem, screened_cfg);
    const auto t1 = std::chrono::steady_clock::now();
    const spo::SolveResult ru = spo::solve(problem, unscreened_cfg);
    const auto t2 = std::chrono::steady_clock::now();

    const double secs_s = std::chrono::duration<double>(t1 - t0).count();
    const double secs_u = std::chrono::duration<double>(t2 - t1).count();
    const double grad_ratio =
        ru.counters.grad_coordinates > 0
            ? static_cast<double>(rs.counters.grad_coordinates) /
                  static_cast<double>(ru.counters.grad_coordinates)
            : 1.0;

    rows += spo::format_double(ratio * lmax) + ',' + spo::format_double(ratio) + ',' +
            std::to_string(rs.iterations) + ',' + std::to_string(ru.iterations) + ',' +
            std::to_string(rs.counters.grad_coordinates) + ',' +
            std::to_string(ru.counters.grad_coordinates) + ',' +
            spo::format_double(grad_ratio) + ',' +
            std::to_string(rs.screened_indices.size()) + '\n';
    timing += spo::format_double(ratio) + ',' + spo::format_double(secs_s) + ',' +
              spo::format_double(secs_u) + ',' +
              spo::format_double(secs_u > 0.0 ? secs_s / secs_u : 1.0) + '\n';
    for (const spo::TracePoint& pt : rs.trace) {
      heat += spo::format_double(ratio) + ',' + std::to_string(pt.iteration) + ',' +
              spo::format_double(static_cast<double>(pt.screened) / d_total) + '\n';
      traces += spo::format_double(ratio) + ",screened," + std::to_string(pt.iteration) +
                ',' + spo::format_double(pt.gap) + ',' + spo::format_double(pt.seconds) +
                '\n';
    }
    for (const spo::TracePoint& pt : ru.trace) {
      traces += spo::format_double(ratio) + ",unscreened," +
                std::to_string(pt.iteration) + ',' + spo::format_double(pt.gap) + ',' +
                spo::format_double(pt.seconds) + '\n';
    }
  }

  const auto dir = prepare_out_dir(cfg);
  write_text(dir / "ratios.csv", rows);
  write_text(dir / "timings.csv", timing);  // wall clock; excluded from reproducibility
  write_text(dir / "screen_ratio_trace.csv", heat);
  write_text(dir / "gap_trace.csv", traces);

  json summary;
  summary["command"] = "bench-screening";
  summary["lambda_max"] = lmax;
  summary["points"] = ratios.size();
  summary["assets"] = model.matrix.assets();
  summary["periods"] = model.matrix.periods();
  summary["config"] = config_to_json(cfg);
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  return 0;
}

void add_common_options(CLI::App* sub, RunConfig& cfg, std::string& config_path) {
  sub->add_option("--config", config_path, "JSON config file; flags override it");
  sub->add_option("--data", cfg.data, "panel CSV (long) or directory (wide)");
  sub->add_option("--format", cfg.format, "data layout: long|wide");
  sub->add_option("--frequency", cfg.frequency, "daily|monthly|quarterly");
  sub->add_option("--rf", cfg.rf, "risk-free CSV (date,rf)");
  sub->add_option("--synth-n", cfg.synth_n, "synthetic panel periods");
  sub->add_option("--synth-d", cfg.synth_d, "synthetic panel assets");
  sub->add_option("--seed", cfg.seed, "synthetic data seed");
  sub->add_option("--utility", cfg.utility, "log|exp");
  sub->add_option("--eta", cfg.eta, "utility shift; negative means automatic");
  sub->add_option("--aversion", cfg.aversion, "exponential risk aversion a");
  sub->add_option("--tol", cfg.tol, "duality-gap tolerance");
  sub->add_option("--max-iter", cfg.max_iter, "iteration cap");
  sub->add_option("--screen-every", cfg.screen_every, "gap/screen cadence");
  sub->add_flag("--accelerate", cfg.accelerate, "stabilized per-coordinate updates");
  sub->add_option("--clip", cfg.clip, "winsorize inputs at this pooled quantile");
  sub->add_option("--threads", cfg.threads, "worker cap for CV folds");
  sub->add_option("--out", cfg.out, "artifact directory");
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  std::string config_path;

  // first pass: locate --config so flags can override its contents
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
  }
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw spo::ConfigError("cannot open config " + config_path);
      json j;
      in >> j;
      config_from_json(j, cfg);
    }
  } catch (const json::exception& e) {
    std::cerr << "error: bad config file: " << e.what() << "\n";
    return 1;
  } catch (const spo::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  CLI::App app{"sparse portfolio selection toolkit"};
  app.require_subcommand(1);

  auto* solve_cmd = app.add_subcommand("solve", "one l1-regularized fit");
  add_common_options(solve_cmd, cfg, config_path);
  solve_cmd->add_option("--lambda", cfg.lambda, "regularization level");
  solve_cmd->add_option("--lambda-ratio", cfg.lambda_ratio, "lambda as a fraction of lambda_max");

  auto* path_cmd = app.add_subcommand("path", "regularization path");
  add_common_options(path_cmd, cfg, config_path);
  path_cmd->add_option("--grid", [&cfg](const std::vector<std::string>& vals) {
    const std::string& spec = vals.back();
    const auto colon = spec.find(':');
    cfg.grid_points = std::stoi(spec.substr(0, colon));
    if (colon != std::string::npos) cfg.grid_decades = std::stod(spec.substr(colon + 1));
    return true;
  }, "grid as POINTS[:DECADES]");

  auto* backtest_cmd = app.add_subcommand("backtest", "rolling-window evaluation");
  add_common_options(backtest_cmd, cfg, config_path);
  backtest_cmd->add_option("--strategy", cfg.strategy, "LOG|EXP|EW|GMV-P|MV-P");
  backtest_cmd->add_option("--train-window", cfg.train_window, "training periods");
  backtest_cmd->add_option("--hold-window", cfg.hold_window, "holding periods");
  backtest_cmd->add_option("--cv-folds", cfg.cv_folds, "walk-forward folds");
  backtest_cmd->add_option("--grid", [&cfg](const std::vector<std::string>& vals) {
    const std::string& spec = vals.back();
    const auto colon = spec.find(':');
    cfg.grid_points = std::stoi(spec.substr(0, colon));
    if (colon != std::string::npos) cfg.grid_decades = std::stod(spec.substr(colon + 1));
    return true;
  }, "lambda grid as POINTS[:DECADES]");
  backtest_cmd->add_flag("--fees", cfg.fees, "charge transaction costs");
  backtest_cmd->add_option("--fee-rate", cfg.fee_rate, "proportional fee c");
  backtest_cmd->add_option("--activity-fee", cfg.activity_fee, "per-asset activity fee c'");
  backtest_cmd->add_option("--cardinality", cfg.cardinality, "max held assets s");
  backtest_cmd->add_option("--n-min", cfg.n_min, "minimum held assets");
  backtest_cmd->add_option("--factor", cfg.factor, "train on a factor signal: sr|rsi");

  auto* bench_cmd = app.add_subcommand("bench-screening", "screened vs unscreened solves");
  add_common_options(bench_cmd, cfg, config_path);
  bench_cmd->add_option("--bench-points", cfg.bench_points, "lambda ratios to test");
  bench_cmd->add_option("--bench-decades", cfg.bench_decades, "ratio range in decades");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(solve_cmd)) {
      cfg.command = "solve";
      return cmd_solve(cfg);
    }
    if (app.got_subcommand(path_cmd)) {
      cfg.command = "path";
      return cmd_path(cfg);
    }
    if (app.got_subcommand(backtest_cmd)) {
      cfg.command = "backtest";
      return cmd_backtest(cfg);
    }
    cfg.command = "bench-screening";
    return cmd_bench_screening(cfg);
  } catch (const spo::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const spo::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const spo::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
