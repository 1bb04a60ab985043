#include "spo/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include <zlib.h>

#include "spo/errors.hpp"

namespace spo {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string read_text_file(const std::string& path) {
  if (path.size() > 3 && path.compare(path.size() - 3, 3, ".gz") == 0) {
    gzFile f = gzopen(path.c_str(), "rb");
    if (!f) {
      throw DataError("cannot open " + path);
    }
    std::string out;
    char buf[1 << 16];
    int got = 0;
    while ((got = gzread(f, buf, sizeof(buf))) > 0) {
      out.append(buf, static_cast<std::size_t>(got));
    }
    const bool failed = got < 0;
    gzclose(f);
    if (failed) {
      throw DataError("gzip read error in " + path);
    }
    return out;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_number(const std::string& field, int line_no, const std::string& file) {
  const char* begin = field.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw DataError(file + ":" + std::to_string(line_no) + ": cannot parse number '" +
                    field + "'");
  }
  return v;
}

void check_return_value(double ret, int line_no, const std::string& file) {
  if (!(ret > -1.0)) {
    throw DataError(file + ":" + std::to_string(line_no) + ": return " +
                    std::to_string(ret) + " implies a nonpositive price relative");
  }
}

struct WideTable {
  std::vector<std::string> dates;
  std::vector<std::string> tickers;
  Eigen::MatrixXd values;  // NaN where empty
};

WideTable parse_wide_file(const std::string& path) {
  const std::string text = read_text_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError(path + ": empty file");
  }
  const std::vector<std::string> header = split_line(line);
  if (header.size() < 2) {
    throw DataError(path + ": header needs a date column and at least one ticker");
  }
  WideTable table;
  table.tickers.assign(header.begin() + 1, header.end());
  {
    std::vector<std::string> sorted = table.tickers;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw DataError(path + ": duplicate ticker column");
    }
  }

  std::vector<std::pair<std::string, std::vector<std::string>>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> fields = split_line(line);
    if (fields.size() != header.size()) {
      throw DataError(path + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " fields, got " +
                      std::to_string(fields.size()));
    }
    rows.emplace_back(fields[0], std::vector<std::string>(fields.begin() + 1, fields.end()));
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].first == rows[i - 1].first) {
      throw DataError(path + ": duplicate date " + rows[i].first);
    }
  }

  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index d = static_cast<Eigen::Index>(table.tickers.size());
  table.values = Eigen::MatrixXd::Constant(n, d, kNaN);
  table.dates.reserve(rows.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    table.dates.push_back(rows[static_cast<std::size_t>(i)].first);
    const auto& cells = rows[static_cast<std::size_t>(i)].second;
    for (Eigen::Index j = 0; j < d; ++j) {
      const std::string& cell = cells[static_cast<std::size_t>(j)];
      if (!cell.empty()) {
        table.values(i, j) = parse_number(cell, static_cast<int>(i) + 2, path);
      }
    }
  }
  return table;
}

MarketPanel load_long(const std::string& path, Frequency frequency) {
  const std::string text = read_text_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError(path + ": empty file");
  }
  const std::vector<std::string> header = split_line(line);
  auto column = [&](const std::string& name) -> int {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
  };
  const int c_date = column("date");
  const int c_ticker = column("ticker");
  const int c_open = column("open");
  const int c_close = column("close");
  const int c_ret = column("return");
  if (c_date < 0 || c_ticker < 0 || c_ret < 0) {
    throw DataError(path + ": long format needs date, ticker and return columns");
  }

  struct Record {
    int line_no;
    std::string date, ticker;
    std::string open, close, ret;
  };
  std::vector<Record> records;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> fields = split_line(line);
    if (fields.size() != header.size()) {
      throw DataError(path + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " fields, got " +
                      std::to_string(fields.size()));
    }
    Record r;
    r.line_no = line_no;
    r.date = fields[static_cast<std::size_t>(c_date)];
    r.ticker = fields[static_cast<std::size_t>(c_ticker)];
    if (r.date.empty() || r.ticker.empty()) {
      throw DataError(path + ":" + std::to_string(line_no) + ": empty date or ticker");
    }
    if (c_open >= 0) r.open = fields[static_cast<std::size_t>(c_open)];
    if (c_close >= 0) r.close = fields[static_cast<std::size_t>(c_close)];
    r.ret = fields[static_cast<std::size_t>(c_ret)];
    records.push_back(std::move(r));
  }

  std::vector<std::string> dates, tickers;
  for (const Record& r : records) {
    dates.push_back(r.date);
    tickers.push_back(r.ticker);
  }
  std::sort(dates.begin(), dates.end());
  dates.erase(std::unique(dates.begin(), dates.end()), dates.end());
  std::sort(tickers.begin(), tickers.end());
  tickers.erase(std::unique(tickers.begin(), tickers.end()), tickers.end());

  std::map<std::string, int> date_index, ticker_index;
  for (std::size_t i = 0; i < dates.size(); ++i) date_index[dates[i]] = static_cast<int>(i);
  for (std::size_t j = 0; j < tickers.size(); ++j)
    ticker_index[tickers[j]] = static_cast<int>(j);

  const Eigen::Index n = static_cast<Eigen::Index>(dates.size());
  const Eigen::Index d = static_cast<Eigen::Index>(tickers.size());
  MarketPanel panel;
  panel.frequency = frequency;
  panel.dates = std::move(dates);
  panel.tickers = std::move(tickers);
  panel.open = Eigen::MatrixXd::Constant(n, d, kNaN);
  panel.close = Eigen::MatrixXd::Constant(n, d, kNaN);
  panel.returns = Eigen::MatrixXd::Constant(n, d, kNaN);
  panel.available = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, d, false);
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> seen =
      Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, d, false);

  for (const Record& r : records) {
    const int i = date_index[r.date];
    const int j = ticker_index[r.ticker];
    if (seen(i, j)) {
      throw DataError(path + ":" + std::to_string(r.line_no) + ": duplicate (" + r.date +
                      ", " + r.ticker + ")");
    }
    seen(i, j) = true;
    if (!r.ret.empty()) {
      const double ret = parse_number(r.ret, r.line_no, path);
      check_return_value(ret, r.line_no, path);
      panel.returns(i, j) = ret;
      panel.available(i, j) = true;
    }
    if (!r.open.empty()) panel.open(i, j) = parse_number(r.open, r.line_no, path);
    if (!r.close.empty()) panel.close(i, j) = parse_number(r.close, r.line_no, path);
  }
  panel.has_prices = panel.open.array().isFinite().any() && panel.close.array().isFinite().any();
  return panel;
}

std::string find_wide_file(const std::filesystem::path& dir, const std::string& stem) {
  const std::filesystem::path plain = dir / (stem + ".csv");
  if (std::filesystem::exists(plain)) return plain.string();
  const std::filesystem::path gz = dir / (stem + ".csv.gz");
  if (std::filesystem::exists(gz)) return gz.string();
  return {};
}

MarketPanel load_wide(const std::string& path, Frequency frequency) {
  const std::filesystem::path dir(path);
  if (!std::filesystem::is_directory(dir)) {
    throw DataError(path + ": wide format expects a directory");
  }
  const std::string returns_path = find_wide_file(dir, "returns");
  if (returns_path.empty()) {
    throw DataError(path + ": wide format needs returns.csv");
  }
  WideTable returns_table = parse_wide_file(returns_path);

  MarketPanel panel;
  panel.frequency = frequency;
  panel.dates = returns_table.dates;
  panel.tickers = returns_table.tickers;
  const Eigen::Index n = returns_table.values.rows();
  const Eigen::Index d = returns_table.values.cols();
  panel.returns = std::move(returns_table.values);
  panel.available = panel.returns.array().isFinite();
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (panel.available(i, j)) {
        check_return_value(panel.returns(i, j), static_cast<int>(i) + 2, returns_path);
      }
    }
  }

  panel.open = Eigen::MatrixXd::Constant(n, d, kNaN);
  panel.close = Eigen::MatrixXd::Constant(n, d, kNaN);
  for (const std::string& stem : {std::string("open"), std::string("close")}) {
    const std::string file = find_wide_file(dir, stem);
    if (file.empty()) continue;
    WideTable t = parse_wide_file(file);
    if (t.dates != panel.dates || t.tickers != panel.tickers) {
      throw DataError(file + ": grid does not match returns.csv");
    }
    if (stem == "open") {
      panel.open = std::move(t.values);
    } else {
      panel.close = std::move(t.values);
    }
    panel.has_prices = true;
  }
  return panel;
}

}  // namespace

int periods_per_year(Frequency f) {
  switch (f) {
    case Frequency::Daily: return 252;
    case Frequency::Monthly: return 12;
    case Frequency::Quarterly: return 4;
  }
  return 252;
}

int MarketPanel::row_of_date(const std::string& date) const {
  const auto it = std::lower_bound(dates.begin(), dates.end(), date);
  if (it == dates.end() || *it != date) return -1;
  return static_cast<int>(it - dates.begin());
}

MarketPanel load_panel(const std::string& path, PanelFormat format, Frequency frequency) {
  MarketPanel panel = format == PanelFormat::LongCsv ? load_long(path, frequency)
                                                     : load_wide(path, frequency);
  for (std::size_t i = 1; i < panel.dates.size(); ++i) {
    if (!(panel.dates[i - 1] < panel.dates[i])) {
      throw DataError(path + ": dates not strictly increasing");
    }
  }
  return panel;
}

std::vector<int> filter_universe(const MarketPanel& panel, int as_of_row, int lookback) {
  if (as_of_row < 0 || as_of_row >= panel.num_periods()) {
    throw std::invalid_argument("filter_universe: as_of_row out of range");
  }
  if (lookback < 1 || as_of_row - lookback + 1 < 0) {
    throw std::invalid_argument("filter_universe: lookback exceeds available history");
  }
  const int first = as_of_row - lookback + 1;
  std::vector<int> subset;
  for (Eigen::Index j = 0; j < panel.num_assets(); ++j) {
    bool complete = true;
    for (int i = first; i <= as_of_row; ++i) {
      if (!panel.available(i, j)) {
        complete = false;
        break;
      }
    }
    if (complete) subset.push_back(static_cast<int>(j));
  }
  return subset;
}

PriceRelativeMatrix to_price_relatives(const MarketPanel& panel,
                                       const std::vector<int>& subset, RowRange window) {
  if (window.begin < 0 || window.end > panel.num_periods() || window.size() < 1) {
    throw std::invalid_argument("to_price_relatives: bad row range");
  }
  Eigen::MatrixXd X(window.size(), static_cast<Eigen::Index>(subset.size()));
  for (std::size_t k = 0; k < subset.size(); ++k) {
    const int j = subset[k];
    for (int i = window.begin; i < window.end; ++i) {
      if (!panel.available(i, j)) {
        throw DataError("to_price_relatives: missing cell at row " + std::to_string(i) +
                        ", ticker " + panel.tickers[static_cast<std::size_t>(j)]);
      }
      X(i - window.begin, static_cast<Eigen::Index>(k)) = 1.0 + panel.returns(i, j);
    }
  }
  return PriceRelativeMatrix::validated(std::move(X));
}

PriceRelativeMatrix clip_quantiles(const PriceRelativeMatrix& relatives, double q) {
  if (!(q > 0.0) || !(q < 0.5)) {
    throw std::invalid_argument("clip_quantiles: q must lie in (0, 0.5)");
  }
  const Eigen::MatrixXd& X = relatives.values();
  std::vector<double> pooled(X.data(), X.data() + X.size());
  std::sort(pooled.begin(), pooled.end());
  const auto m = static_cast<double>(pooled.size());
  // order-statistic band (floor below, ceiling above); the edges are observed
  // values, which makes re-clipping a no-op
  const auto lo_idx = static_cast<std::size_t>(std::floor(q * (m - 1.0)));
  const auto hi_idx = static_cast<std::size_t>(std::ceil((1.0 - q) * (m - 1.0)));
  const double lo = pooled[lo_idx];
  const double hi = pooled[hi_idx];
  Eigen::MatrixXd clipped = X.array().max(lo).min(hi);
  return PriceRelativeMatrix::unchecked(std::move(clipped));
}

FactorPanel factor_rsi(const MarketPanel& panel, double smoothing) {
  if (!(smoothing > 0.0) || !(smoothing <= 1.0)) {
    throw std::invalid_argument("factor_rsi: smoothing must lie in (0, 1]");
  }
  const Eigen::Index n = panel.num_periods();
  const Eigen::Index d = panel.num_assets();
  FactorPanel out;
  out.kind = FactorKind::RelativeStrength;
  out.values = Eigen::MatrixXd::Constant(n, d, kNaN);
  out.available = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, d, false);
  out.flagged = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, d, false);

  for (Eigen::Index j = 0; j < d; ++j) {
    bool started = false;
    double m_pos = 0.0;
    double m_abs = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double open = panel.open(i, j);
      const double close = panel.close(i, j);
      if (!std::isfinite(open) || !std::isfinite(close)) continue;
      const double dif = close - open;
      const double pos = std::max(dif, 0.0);
      const double mag = std::abs(dif);
      if (!started) {
        m_pos = pos;
        m_abs = mag;
        started = true;
      } else {
        m_pos = smoothing * pos + (1.0 - smoothing) * m_pos;
        m_abs = smoothing * mag + (1.0 - smoothing) * m_abs;
      }
      out.available(i, j) = true;
      if (m_abs == 0.0) {
        out.values(i, j) = 0.5;  // neutral when there has been no movement at all
        out.flagged(i, j) = true;
      } else {
        out.values(i, j) = m_pos / m_abs;
      }
    }
  }
  return out;
}

FactorPanel factor_sr(const MarketPanel& panel, int sharpe_window, int average_window) {
  if (sharpe_window < 2) {
    throw std::invalid_argument("factor_sr: sharpe window must be >= 2");
  }
  if (average_window < 1) {
    throw std::invalid_argument("factor_sr: averaging window must be >= 1");
  }
  const Eigen::Index n = panel.num_periods();
  const Eigen::Index d = panel.num_assets();

  Eigen::MatrixXd sharpe = Eigen::MatrixXd::Constant(n, d, kNaN);
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> sharpe_flag =
      Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, d, false);

  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = sharpe_window - 1; i < n; ++i) {
      bool complete = true;
      double sum = 0.0;
      for (Eigen::Index k = i - sharpe_window + 1; k <= i; ++k) {
        if (!panel.available(k, j)) {
          complete = false;
          break;
        }
        sum += panel.returns(k, j);
      }
      if (!complete) continue;
      const double mean = sum / sharpe_window;
      double ss = 0.0;
      for (Eigen::Index k = i - sharpe_window + 1; k <= i; ++k) {
        const double dev = panel.returns(k, j) - mean;
        ss += dev * dev;
      }
      const double sd = std::sqrt(ss / (sharpe_window - 1));
      if (sd == 0.0) {
        sharpe(i, j) = 0.0;
        sharpe_flag(i, j) = true;
      } else {
        sharpe(i, j) = mean / sd;
      }
    }
  }

  FactorPanel out;
  out.kind = FactorKind::SharpeMovingAverage;
  out.values = Eigen::MatrixXd::Constant(n, d, kNaN);
  out.available = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, d, false);
  out.flagged = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, d, false);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = average_window - 1; i < n; ++i) {
      bool complete = true;
      bool flagged = false;
      double sum = 0.0;
      for (Eigen::Index k = i - average_window + 1; k <= i; ++k) {
        if (!std::isfinite(sharpe(k, j))) {
          complete = false;
          break;
        }
        sum += sharpe(k, j);
        flagged = flagged || sharpe_flag(k, j);
      }
      if (!complete) continue;
      out.values(i, j) = sum / average_window;
      out.available(i, j) = true;
      out.flagged(i, j) = flagged;
    }
  }
  return out;
}

std::vector<int> factor_complete_rows(const FactorPanel& factor,
                                      const std::vector<int>& subset, RowRange window) {
  std::vector<int> rows;
  for (int i = window.begin; i < window.end; ++i) {
    bool ok = true;
    for (int j : subset) {
      if (!factor.available(i, j)) {
        ok = false;
        break;
      }
    }
    if (ok) rows.push_back(i);
  }
  return rows;
}

PriceRelativeMatrix factor_model_inputs(const FactorPanel& factor,
                                        const std::vector<int>& subset, RowRange window,
                                        double floor_eps) {
  if (!(floor_eps > 0.0)) {
    throw std::invalid_argument("factor_model_inputs: floor must be > 0");
  }
  if (subset.empty() || window.size() < 1) {
    throw std::invalid_argument("factor_model_inputs: empty subset or window");
  }
  const auto d = static_cast<Eigen::Index>(subset.size());
  Eigen::MatrixXd X(window.size(), d);
  for (int i = window.begin; i < window.end; ++i) {
    double mean = 0.0;
    for (int j : subset) {
      if (!factor.available(i, j)) {
        throw DataError("factor_model_inputs: factor unavailable at row " +
                        std::to_string(i) + ", column " + std::to_string(j));
      }
      mean += factor.values(i, j);
    }
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (int j : subset) {
      const double dev = factor.values(i, j) - mean;
      var += dev * dev;
    }
    const double sd = std::sqrt(var / static_cast<double>(d));
    const Eigen::Index row = i - window.begin;
    for (Eigen::Index k = 0; k < d; ++k) {
      if (sd == 0.0) {
        X(row, k) = 1.0;
      } else {
        const double z = (factor.values(i, subset[static_cast<std::size_t>(k)]) - mean) / sd;
        X(row, k) = std::max(1.0 + z, floor_eps);
      }
    }
  }
  return PriceRelativeMatrix::validated(std::move(X));
}

namespace {

// days-from-civil inverse (Gregorian), days relative to 1970-01-01
void civil_from_days(long long z, int& y, unsigned& m, unsigned& day) {
  z += 719468;
  const long long era = (z >= 0 ? z : z - 146096) / 146097;
  const auto doe = static_cast<unsigned long long>(z - era * 146097);
  const unsigned long long yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const long long year = static_cast<long long>(yoe) + era * 400;
  const unsigned long long doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned long long mp = (5 * doy + 2) / 153;
  day = static_cast<unsigned>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<unsigned>(mp < 10 ? mp + 3 : mp - 9);
  y = static_cast<int>(year + (m <= 2));
}

std::string iso_date(long long days_since_epoch) {
  int y;
  unsigned m, d;
  civil_from_days(days_since_epoch, y, m, d);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", y, m, d);
  return buf;
}

}  // namespace

MarketPanel synthesize_market(const SynthSpec& spec) {
  if (spec.periods < 1 || spec.assets < 1) {
    throw std::invalid_argument("synthesize_market: need periods >= 1 and assets >= 1");
  }
  if (!(spec.block_corr >= 0.0) || !(spec.block_corr < 1.0)) {
    throw std::invalid_argument("synthesize_market: block_corr must lie in [0, 1)");
  }
  if (spec.block_size < 1) {
    throw std::invalid_argument("synthesize_market: block_size must be >= 1");
  }
  const int n = spec.periods;
  const int d = spec.assets;

  Eigen::VectorXd vol(d), drift(d);
  for (int j = 0; j < d; ++j) {
    const double t = d == 1 ? 0.0 : static_cast<double>(j) / (d - 1);
    vol[j] = spec.vol_first + t * (spec.vol_last - spec.vol_first);
    drift[j] = spec.drift_first + t * (spec.drift_last - spec.drift_first);
    if (vol[j] < 0.0) {
      throw std::invalid_argument("synthesize_market: negative volatility");
    }
  }

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int blocks = (d + spec.block_size - 1) / spec.block_size;
  const double common = std::sqrt(spec.block_corr);
  const double idio = std::sqrt(1.0 - spec.block_corr);

  MarketPanel panel;
  panel.frequency = spec.frequency;
  panel.returns.resize(n, d);
  panel.open.resize(n, d);
  panel.close.resize(n, d);
  panel.available = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, d, true);
  panel.has_prices = true;

  Eigen::VectorXd price = Eigen::VectorXd::Ones(d);
  std::vector<double> block_shock(static_cast<std::size_t>(blocks));
  // synthetic business-date labels starting 2000-01-03
  const long long epoch_start = 10959;
  for (int i = 0; i < n; ++i) {
    panel.dates.push_back(iso_date(epoch_start + i));
    for (int b = 0; b < blocks; ++b) {
      block_shock[static_cast<std::size_t>(b)] = gauss(rng);
    }
    for (int j = 0; j < d; ++j) {
      const double shock =
          common * block_shock[static_cast<std::size_t>(j / spec.block_size)] +
          idio * gauss(rng);
      const double relative = std::exp(drift[j] + vol[j] * shock);
      panel.returns(i, j) = relative - 1.0;
      panel.open(i, j) = price[j];
      price[j] *= relative;
      panel.close(i, j) = price[j];
    }
  }
  panel.tickers.reserve(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "S%04d", j);
    panel.tickers.emplace_back(buf);
  }
  return panel;
}

}  // namespace spo
