#include "igl/backtest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

#include "igl/csv.hpp"
#include "igl/errors.hpp"

namespace igl::backtest {

using Eigen::Index;

namespace {

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool iso_date(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  const int month = (s[5] - '0') * 10 + (s[6] - '0');
  const int day = (s[8] - '0') * 10 + (s[9] - '0');
  return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

double price(const std::string& field, std::size_t line, const char* name) {
  const std::string s = trim(field);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw MalformedRow(line, std::string("bad ") + name + " '" + field + "'");
  }
  if (!std::isfinite(v) || !(v > 0.0)) throw MalformedRow(line, std::string(name) + " must be positive");
  return v;
}

struct Bar {
  double open, high, low, close;
};

}  // namespace

OhlcPanel parse_ohlc(std::string_view text, std::vector<std::string>* warnings) {
  auto warn = [&](std::string msg) {
    if (warnings != nullptr) warnings->push_back(std::move(msg));
  };
  const auto rows = csv::parse(text);
  if (rows.size() < 2) throw EmptyPanel("OHLC file has no data rows");

  std::map<std::string, std::size_t> col;
  for (std::size_t j = 0; j < rows[0].size(); ++j) col[lowercase(trim(rows[0][j]))] = j;
  for (const char* need : {"date", "ticker", "open", "high", "low", "close"}) {
    if (!col.count(need)) throw MalformedRow(1, std::string("missing column '") + need + "'");
  }
  const std::size_t width = rows[0].size();

  std::map<std::string, std::map<std::string, Bar>> by_ticker;
  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::size_t line = r + 1;
    if (row.size() != width) throw MalformedRow(line, "wrong number of fields");
    const std::string date = trim(row[col["date"]]);
    const std::string ticker = trim(row[col["ticker"]]);
    if (!iso_date(date)) throw MalformedRow(line, "date '" + date + "' is not yyyy-mm-dd");
    if (ticker.empty()) throw MalformedRow(line, "empty ticker");
    const Bar bar{price(row[col["open"]], line, "open"), price(row[col["high"]], line, "high"),
                  price(row[col["low"]], line, "low"), price(row[col["close"]], line, "close")};
    if (!seen.emplace(date, ticker).second) {
      throw MalformedRow(line, "duplicate (date, ticker) " + date + " " + ticker);
    }
    auto& series = by_ticker[ticker];
    if (bar.low > std::min(bar.open, bar.close) || bar.high < std::max(bar.open, bar.close)) {
      warn("line " + std::to_string(line) + ": inconsistent OHLC for " + ticker + " on " + date + ", dropped");
      continue;
    }
    series.emplace(date, bar);
  }

  std::size_t most = 0;
  for (const auto& [ticker, series] : by_ticker) most = std::max(most, series.size());
  if (most == 0) throw EmptyPanel("no valid OHLC rows");

  std::vector<std::string> tickers;
  for (const auto& [ticker, series] : by_ticker) {
    if (series.size() == most) {
      tickers.push_back(ticker);
    } else {
      warn("ticker " + ticker + " has " + std::to_string(series.size()) + " of " + std::to_string(most) +
           " records, removed");
    }
  }

  std::vector<std::string> dates;
  for (const auto& [date, bar] : by_ticker[tickers.front()]) {
    const bool everywhere = std::all_of(tickers.begin(), tickers.end(),
                                        [&](const std::string& t) { return by_ticker[t].count(date) > 0; });
    if (everywhere) {
      dates.push_back(date);
    } else {
      warn("date " + date + " is not common to all retained tickers, removed");
    }
  }
  if (dates.empty()) throw EmptyPanel("retained tickers share no trading days");

  OhlcPanel panel;
  panel.dates = dates;
  panel.tickers = tickers;
  const auto t = static_cast<Index>(dates.size());
  const auto p = static_cast<Index>(tickers.size());
  panel.open.resize(t, p);
  panel.high.resize(t, p);
  panel.low.resize(t, p);
  panel.close.resize(t, p);
  for (Index j = 0; j < p; ++j) {
    const auto& series = by_ticker[tickers[static_cast<std::size_t>(j)]];
    for (Index i = 0; i < t; ++i) {
      const Bar& b = series.at(dates[static_cast<std::size_t>(i)]);
      panel.open(i, j) = b.open;
      panel.high(i, j) = b.high;
      panel.low(i, j) = b.low;
      panel.close(i, j) = b.close;
    }
  }
  return panel;
}

OhlcPanel load_ohlc(const std::string& path, std::vector<std::string>* warnings) {
  return parse_ohlc(csv::read_file(path), warnings);
}

OhlcPanel tail(const OhlcPanel& panel, Index days) {
  if (days <= 0 || days >= panel.days()) return panel;
  const Index first = panel.days() - days;
  OhlcPanel out;
  out.dates.assign(panel.dates.begin() + first, panel.dates.end());
  out.tickers = panel.tickers;
  out.open = panel.open.bottomRows(days);
  out.high = panel.high.bottomRows(days);
  out.low = panel.low.bottomRows(days);
  out.close = panel.close.bottomRows(days);
  return out;
}

IntradayReturns standardize_intraday(const OhlcPanel& panel) {
  if ((panel.open.array() <= 0.0).any()) throw NonPositiveOpen("open prices must be positive");
  IntradayReturns r;
  r.high = (panel.high.array() / panel.open.array() - 1.0).matrix();
  r.low = (panel.low.array() / panel.open.array() - 1.0).matrix();
  r.close = (panel.close.array() / panel.open.array() - 1.0).matrix();
  r.mid = ((panel.high.array() + panel.low.array()) / (2.0 * panel.open.array()) - 1.0).matrix();
  return r;
}

Matrix close_to_close_returns(const OhlcPanel& panel) {
  Matrix r = Matrix::Zero(panel.days(), panel.assets());
  for (Index t = 1; t < panel.days(); ++t) {
    r.row(t) = (panel.close.row(t).array() / panel.close.row(t - 1).array() - 1.0).matrix();
  }
  return r;
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::one_over_n: return "1/N";
    case Strategy::close: return "Standard";
    case Strategy::high: return "High";
    case Strategy::low: return "Low";
    case Strategy::mid: return "Mid";
    case Strategy::interval: return "Interval";
  }
  return "?";
}

Strategy parse_strategy(const std::string& s) {
  const std::string k = lowercase(trim(s));
  if (k == "1/n" || k == "one_over_n" || k == "1n" || k == "naive") return Strategy::one_over_n;
  if (k == "close" || k == "standard") return Strategy::close;
  if (k == "high") return Strategy::high;
  if (k == "low") return Strategy::low;
  if (k == "mid") return Strategy::mid;
  if (k == "interval" || k == "igl") return Strategy::interval;
  throw InvalidConfig("unknown strategy '" + s + "'");
}

Vector max_sharpe_weights(const Vector& mu, const Matrix& omega) {
  if (omega.rows() != mu.size() || omega.cols() != mu.size()) throw ShapeMismatch("mu and omega disagree");
  const Vector raw = omega * mu;
  const double denom = raw.sum();
  if (!(std::abs(denom) >= 1e-12)) throw DegenerateDenominator("1^T omega mu is numerically zero");
  return raw / denom;
}

Index window_count(Index days, Index est_window, Index hold) {
  if (hold <= 0 || days < est_window + hold) return 0;
  return (days - est_window) / hold;
}

namespace {

struct Estimate {
  Vector weights;
  double lambda = 0.0;
};

Estimate estimate_window(const IntradayReturns& src, Strategy strategy, Index first, Index len,
                         const BacktestConfig& cfg) {
  const Index p = src.close.cols();
  Estimate est;
  if (strategy == Strategy::one_over_n) {
    est.weights = Vector::Constant(p, 1.0 / static_cast<double>(p));
    return est;
  }
  Matrix lower;
  Matrix upper;
  switch (strategy) {
    case Strategy::close: lower = upper = src.close.middleRows(first, len); break;
    case Strategy::high: lower = upper = src.high.middleRows(first, len); break;
    case Strategy::low: lower = upper = src.low.middleRows(first, len); break;
    case Strategy::mid: lower = upper = src.mid.middleRows(first, len); break;
    case Strategy::interval:
      lower = src.low.middleRows(first, len);
      upper = src.high.middleRows(first, len);
      break;
    case Strategy::one_over_n: break;
  }
  // Point strategies are the zero-width special case of the interval model.
  const IntervalMatrix x = validate_intervals(lower, upper);
  const CovariancePair cov = bound_covariances(x);
  const LambdaGrid grid = lambda_grid(cov.pooled, cfg.grid_count, cfg.grid_ratio);
  const PathResult path = select_lambda(cov, grid.values, cov.n, cfg.solver);
  est.lambda = path.grid[static_cast<std::size_t>(path.selected_index)];

  const Vector mu = cfg.mu_source == MuSource::close
                        ? Vector(src.close.middleRows(first, len).colwise().mean().transpose())
                        : Vector(x.midpoints().colwise().mean().transpose());
  est.weights = max_sharpe_weights(mu, path.selected().theta_hat);
  return est;
}

}  // namespace

BacktestReport rolling_backtest(const OhlcPanel& panel, Strategy strategy, const BacktestConfig& cfg) {
  if (cfg.est_window < 2 || cfg.hold < 1) throw InvalidConfig("est_window must be >= 2 and hold >= 1");
  if (panel.days() < cfg.est_window + cfg.hold) {
    throw InvalidConfig("panel has " + std::to_string(panel.days()) + " days, need at least " +
                        std::to_string(cfg.est_window + cfg.hold));
  }
  const IntradayReturns src = standardize_intraday(panel);
  const Matrix realized = close_to_close_returns(panel);
  const Index p = panel.assets();
  const Index windows = window_count(panel.days(), cfg.est_window, cfg.hold);

  BacktestReport report;
  report.strategy = strategy;
  report.tickers = panel.tickers;
  Vector previous = Vector::Constant(p, 1.0 / static_cast<double>(p));
  for (Index k = 0; k < windows; ++k) {
    WindowRecord rec;
    rec.hold_first = cfg.est_window + k * cfg.hold;
    rec.est_first = rec.hold_first - cfg.est_window;
    rec.hold_last = rec.hold_first + cfg.hold - 1;
    rec.rebalance_date = panel.dates[static_cast<std::size_t>(rec.hold_first - 1)];
    try {
      Estimate est = estimate_window(src, strategy, rec.est_first, cfg.est_window, cfg);
      rec.weights = std::move(est.weights);
      rec.lambda = est.lambda;
    } catch (const Error& ex) {
      rec.weights = previous;
      rec.carried = true;
      rec.note = ex.what();
    }
    previous = rec.weights;
    for (Index t = rec.hold_first; t <= rec.hold_last; ++t) {
      rec.returns.push_back(realized.row(t).dot(rec.weights));
    }
    report.windows.push_back(std::move(rec));
  }
  return report;
}

std::vector<BacktestReport> run_strategies(const OhlcPanel& panel, const std::vector<Strategy>& strategies,
                                           const BacktestConfig& cfg, int jobs) {
  std::vector<BacktestReport> out(strategies.size());
  std::vector<std::string> errors(strategies.size());
  const auto count = static_cast<long>(strategies.size());
  auto job = [&](long k) {
    const auto i = static_cast<std::size_t>(k);
    try {
      out[i] = rolling_backtest(panel, strategies[i], cfg);
    } catch (const std::exception& ex) {
      errors[i] = ex.what();
    }
  };
  if (jobs > 1) {
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs)
    for (long k = 0; k < count; ++k) job(k);
  } else {
    for (long k = 0; k < count; ++k) job(k);
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw InvalidConfig(e);
  }
  return out;
}

BlockMetrics block_metrics(const std::vector<double>& daily) {
  BlockMetrics m;
  if (daily.empty()) return m;
  const double n = static_cast<double>(daily.size());
  double sum = 0.0;
  for (double r : daily) sum += r;
  const double mean = sum / n;
  double ss = 0.0;
  for (double r : daily) ss += (r - mean) * (r - mean);
  const double sd = daily.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  m.ann_return = mean * kTradingDays;
  // Roundoff on a constant series leaves sd ~ 1e-19; that is zero volatility.
  m.ann_vol = sd < 1e-15 ? 0.0 : sd * std::sqrt(kTradingDays);
  if (m.ann_vol > 0.0) m.sharpe = m.ann_return / m.ann_vol;
  return m;
}

PerformanceSummary performance(const BacktestReport& report) {
  if (report.windows.empty()) throw InvalidConfig("backtest report has no windows");
  PerformanceSummary s;
  std::vector<double> all;
  double sharpe_sum = 0.0;
  for (const auto& w : report.windows) {
    BlockMetrics b = block_metrics(w.returns);
    s.ann_return += b.ann_return;
    s.ann_vol += b.ann_vol;
    if (b.sharpe) {
      sharpe_sum += *b.sharpe;
      ++s.sharpe_blocks;
    }
    s.blocks.push_back(b);
    all.insert(all.end(), w.returns.begin(), w.returns.end());
  }
  const double blocks = static_cast<double>(report.windows.size());
  s.ann_return /= blocks;
  s.ann_vol /= blocks;
  s.sharpe = s.sharpe_blocks > 0 ? sharpe_sum / s.sharpe_blocks : std::nan("");
  s.pooled = block_metrics(all);
  return s;
}

}  // namespace igl::backtest
