#include "spo/report_io.hpp"

#include <cstdio>

#include <json.hpp>

namespace spo {

namespace {

nlohmann::json metrics_json(const Metrics& m) {
  nlohmann::json j;
  j["accumulated_excess"] = m.accumulated_excess;
  j["accumulated_total"] = m.accumulated_total;
  j["max_drawdown"] = m.max_drawdown;
  j["sharpe"] = m.sharpe ? nlohmann::json(*m.sharpe) : nlohmann::json(nullptr);
  j["sortino"] = m.sortino ? nlohmann::json(*m.sortino) : nlohmann::json(nullptr);
  return j;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string backtest_summary_json(const BacktestReport& report,
                                  const std::string& config_json) {
  nlohmann::json j;
  j["periods"] = report.dates.size();
  j["rebalances"] = report.rebalances.size();
  j["avg_num_assets"] = report.avg_num_assets;
  j["periods_per_year"] = report.periods_per_year_used;
  j["risk_free_assumed_zero"] = report.risk_free_assumed_zero;
  j["gross"] = metrics_json(report.gross_metrics);
  j["net"] = metrics_json(report.net_metrics);
  j["warnings"] = report.warnings;

  nlohmann::json rebalances = nlohmann::json::array();
  for (const RebalanceRecord& rec : report.rebalances) {
    nlohmann::json r;
    r["date"] = rec.date;
    r["support"] = rec.support;
    r["chosen_param"] = std::isfinite(rec.chosen_param)
                            ? nlohmann::json(rec.chosen_param)
                            : nlohmann::json(nullptr);
    r["degenerate"] = rec.degenerate;
    if (!rec.warning.empty()) r["warning"] = rec.warning;
    rebalances.push_back(std::move(r));
  }
  j["rebalance_log"] = std::move(rebalances);
  j["config"] = nlohmann::json::parse(config_json);
  return j.dump(2) + "\n";
}

std::string backtest_returns_csv(const BacktestReport& report) {
  std::string out = "date,gross,net,risk_free\n";
  for (std::size_t t = 0; t < report.dates.size(); ++t) {
    out += report.dates[t];
    out += ',';
    out += format_double(report.gross[t]);
    out += ',';
    out += format_double(report.net[t]);
    out += ',';
    out += format_double(report.risk_free[t]);
    out += '\n';
  }
  return out;
}

std::string backtest_holdings_csv(const BacktestReport& report,
                                  const std::vector<std::string>& tickers) {
  std::string out = "date,ticker,weight\n";
  for (const RebalanceRecord& rec : report.rebalances) {
    for (std::size_t k = 0; k < rec.asset_ids.size(); ++k) {
      out += rec.date;
      out += ',';
      out += tickers[static_cast<std::size_t>(rec.asset_ids[k])];
      out += ',';
      out += format_double(rec.weights[k]);
      out += '\n';
    }
  }
  return out;
}

}  // namespace spo
