#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "spo/price_matrix.hpp"

namespace spo {

enum class Frequency { Daily, Monthly, Quarterly };
int periods_per_year(Frequency f);

enum class PanelFormat { LongCsv, WideCsv };

/// Market panel: ordered dates x tickers with per-period returns and, when
/// available, open/close prices. Cells absent from the input are masked out.
struct MarketPanel {
  std::vector<std::string> dates;    // strictly increasing ISO-8601
  std::vector<std::string> tickers;  // unique, sorted
  Eigen::MatrixXd open;              // NaN where missing
  Eigen::MatrixXd close;
  Eigen::MatrixXd returns;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> available;
  bool has_prices = false;
  Frequency frequency = Frequency::Daily;

  Eigen::Index num_periods() const { return returns.rows(); }
  Eigen::Index num_assets() const { return returns.cols(); }
  int row_of_date(const std::string& date) const;  // -1 when absent
};

/// Loads a panel from CSV. Long format is a single file with columns
/// date,ticker,open,close,return (open/close may be empty). Wide format is a
/// directory holding returns.csv and optionally open.csv/close.csv, each with
/// a date column followed by one column per ticker. Files ending in .gz are
/// read through zlib.
MarketPanel load_panel(const std::string& path, PanelFormat format,
                       Frequency frequency = Frequency::Daily);

/// Tickers with complete records over the `lookback` periods ending at
/// `as_of_row` (inclusive).
std::vector<int> filter_universe(const MarketPanel& panel, int as_of_row, int lookback);

/// Half-open row range [begin, end).
struct RowRange {
  int begin = 0;
  int end = 0;
  int size() const { return end - begin; }
};

/// Gross relatives 1 + return for the given tickers over the window.
/// Throws DataError when a relative would be nonpositive or a cell is missing.
PriceRelativeMatrix to_price_relatives(const MarketPanel& panel,
                                       const std::vector<int>& subset, RowRange window);

/// Winsorizes all entries into the pooled empirical [q, 1-q] quantile band
/// (linear-interpolation quantiles). Idempotent.
PriceRelativeMatrix clip_quantiles(const PriceRelativeMatrix& relatives, double q = 0.025);

enum class FactorKind { SharpeMovingAverage, RelativeStrength };

struct FactorPanel {
  FactorKind kind = FactorKind::RelativeStrength;
  Eigen::MatrixXd values;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> available;
  // cells produced by a degenerate input (zero dispersion / all-zero moves)
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> flagged;
};

/// Relative strength index in [0, 1]: exponentially weighted positive price
/// moves over exponentially weighted absolute moves, both with the given
/// smoothing factor (m_1 = x_1, m_t = a x_t + (1-a) m_{t-1}). An all-zero
/// history yields the neutral value 0.5, flagged.
FactorPanel factor_rsi(const MarketPanel& panel, double smoothing = 1.0 / 24);

/// Moving average of the rolling in-sample Sharpe ratio. The Sharpe window
/// and the averaging window default to the same length. Zero in-window
/// dispersion yields 0, flagged.
FactorPanel factor_sr(const MarketPanel& panel, int sharpe_window = 26,
                      int average_window = 26);

/// Cross-sectionally standardized factor rows mapped to strictly positive
/// pseudo-relatives: x -> max(1 + (x - mean)/std, floor_eps), computed per
/// period over `subset`. Rows with any unavailable factor cell are rejected.
PriceRelativeMatrix factor_model_inputs(const FactorPanel& factor,
                                        const std::vector<int>& subset, RowRange window,
                                        double floor_eps = 0.01);

/// Rows of `window` whose factor cells are available for every ticker in
/// `subset`; the usable training rows in factor mode.
std::vector<int> factor_complete_rows(const FactorPanel& factor,
                                      const std::vector<int>& subset, RowRange window);

/// Deterministic synthetic market with lognormal relatives, linearly
/// interpolated per-asset volatility/drift and optional block correlation.
struct SynthSpec {
  std::uint64_t seed = 1;
  int periods = 0;
  int assets = 0;
  double vol_first = 0.01;   // per-period log volatility, asset 0
  double vol_last = 0.03;    // per-period log volatility, last asset
  double drift_first = 0.0;  // per-period log drift, asset 0
  double drift_last = 0.0;
  int block_size = 1;        // assets per correlated block
  double block_corr = 0.0;   // common-factor share within a block, in [0, 1)
  Frequency frequency = Frequency::Daily;
};

MarketPanel synthesize_market(const SynthSpec& spec);

}  // namespace spo
