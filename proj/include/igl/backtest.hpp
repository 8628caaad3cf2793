#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "igl/model_selection.hpp"

namespace igl::backtest {

// Balanced daily panel; every matrix is dates x tickers.
struct OhlcPanel {
  std::vector<std::string> dates;  // ISO yyyy-mm-dd, strictly increasing
  std::vector<std::string> tickers;
  Matrix open;
  Matrix high;
  Matrix low;
  Matrix close;

  Eigen::Index days() const noexcept { return close.rows(); }
  Eigen::Index assets() const noexcept { return close.cols(); }
};

/// Long-format CSV with columns date,ticker,open,high,low,close (any order).
/// Rows violating low <= min(open, close) <= max(open, close) <= high are
/// dropped with a warning. Tickers short of the most complete ticker's
/// record count are removed, then the panel is aligned on the dates common
/// to the survivors. Throws MalformedRow (bad field, duplicate key) and
/// EmptyPanel.
OhlcPanel parse_ohlc(std::string_view text, std::vector<std::string>* warnings = nullptr);
OhlcPanel load_ohlc(const std::string& path, std::vector<std::string>* warnings = nullptr);

/// Keeps the last `days` rows.
OhlcPanel tail(const OhlcPanel& panel, Eigen::Index days);

struct IntradayReturns {
  Matrix high;   // high / open - 1
  Matrix low;    // low / open - 1
  Matrix close;  // close / open - 1
  Matrix mid;    // (high + low) / (2 open) - 1
};

/// Throws NonPositiveOpen.
IntradayReturns standardize_intraday(const OhlcPanel& panel);

/// close_t / close_{t-1} - 1; row 0 is zero.
Matrix close_to_close_returns(const OhlcPanel& panel);

// Table order: 1/N, Standard (close), High, Low, Mid, Interval.
enum class Strategy { one_over_n, close, high, low, mid, interval };

inline constexpr Strategy kAllStrategies[] = {Strategy::one_over_n, Strategy::close, Strategy::high,
                                              Strategy::low,        Strategy::mid,   Strategy::interval};

std::string to_string(Strategy s);
/// Accepts "1/N", "one_over_n", "close"/"standard", "high", "low", "mid", "interval".
Strategy parse_strategy(const std::string& s);

/// w = omega mu / (1^T omega mu). Throws DegenerateDenominator when
/// |1^T omega mu| < 1e-12.
Vector max_sharpe_weights(const Vector& mu, const Matrix& omega);

enum class MuSource { strategy, close };

struct BacktestConfig {
  Eigen::Index est_window = 252;
  Eigen::Index hold = 21;
  MuSource mu_source = MuSource::strategy;
  int grid_count = kDefaultGridCount;
  double grid_ratio = kDefaultGridRatio;
  SolverConfig solver{};
};

struct WindowRecord {
  Eigen::Index est_first = 0;   // first estimation row
  Eigen::Index hold_first = 0;  // first holding row; estimation ends the row before
  Eigen::Index hold_last = 0;
  std::string rebalance_date;   // last estimation day
  Vector weights;
  std::vector<double> returns;  // realized portfolio returns over the hold
  double lambda = 0.0;          // selected penalty, 0 for 1/N
  bool carried = false;         // weights carried forward from the previous window
  std::string note;
};

struct BacktestReport {
  Strategy strategy = Strategy::one_over_n;
  std::vector<std::string> tickers;
  std::vector<WindowRecord> windows;
};

/// Number of rebalances: floor((days - est_window) / hold).
Eigen::Index window_count(Eigen::Index days, Eigen::Index est_window, Eigen::Index hold);

/// Rolling estimate-then-hold backtest. Throws InvalidConfig when the panel
/// is shorter than est_window + hold.
BacktestReport rolling_backtest(const OhlcPanel& panel, Strategy strategy, const BacktestConfig& cfg);

/// Runs several strategies over one panel (OpenMP across strategies when
/// jobs > 1). Reports are returned in input order.
std::vector<BacktestReport> run_strategies(const OhlcPanel& panel, const std::vector<Strategy>& strategies,
                                           const BacktestConfig& cfg, int jobs = 1);

inline constexpr double kTradingDays = 252.0;

struct BlockMetrics {
  double ann_return = 0.0;
  double ann_vol = 0.0;
  std::optional<double> sharpe;  // unset when volatility is zero
};

/// mean * 252, sd (n - 1) * sqrt(252), ratio with zero risk-free rate.
BlockMetrics block_metrics(const std::vector<double>& daily);

struct PerformanceSummary {
  std::vector<BlockMetrics> blocks;
  double ann_return = 0.0;    // mean over blocks
  double ann_vol = 0.0;       // mean over blocks
  double sharpe = 0.0;        // mean over blocks with defined Sharpe
  int sharpe_blocks = 0;
  BlockMetrics pooled;        // whole concatenated OOS series
};

/// Throws InvalidConfig on an empty report.
PerformanceSummary performance(const BacktestReport& report);

}  // namespace igl::backtest
