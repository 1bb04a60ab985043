#pragma once

#include <string>
#include <vector>

#include "spo/portfolio.hpp"

namespace spo {

/// Locale-independent, round-trip exact double formatting for CSV artifacts.
std::string format_double(double v);

/// JSON summary of a backtest. `config_json` is embedded verbatim under the
/// "config" key so a run can be reproduced from its own artifacts.
std::string backtest_summary_json(const BacktestReport& report,
                                  const std::string& config_json);

/// Per-period series: date,gross,net,risk_free.
std::string backtest_returns_csv(const BacktestReport& report);

/// Holdings ledger: date,ticker,weight per rebalance.
std::string backtest_holdings_csv(const BacktestReport& report,
                                  const std::vector<std::string>& tickers);

}  // namespace spo
