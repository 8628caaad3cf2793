#include <doctest.h>

#include <cmath>

#include "../support/fixtures.hpp"
#include "igl/backtest.hpp"
#include "igl/errors.hpp"

using igl::Matrix;
using igl::Vector;
namespace bt = igl::backtest;

TEST_CASE("loading drops a ticker with missing days") {
  const std::string csv =
      "date,ticker,open,high,low,close\n"
      "2020-01-02,AAA,10,11,9,10.5\n"
      "2020-01-02,BBB,20,21,19,20.5\n"
      "2020-01-02,CCC,5,6,4,5.5\n"
      "2020-01-03,AAA,10,11,9,10.5\n"
      "2020-01-03,BBB,20,21,19,20.5\n"
      "2020-01-06,AAA,10,11,9,10.5\n"
      "2020-01-06,BBB,20,21,19,20.5\n"
      "2020-01-06,CCC,5,6,4,5.5\n";
  const auto p = bt::parse_ohlc(csv);
  CHECK(p.tickers == std::vector<std::string>{"AAA", "BBB"});
  CHECK(p.dates.size() == 3);
  CHECK(p.close.rows() == 3);
  CHECK(p.close(2, 1) == 20.5);
}

TEST_CASE("duplicate keys are malformed") {
  const std::string csv =
      "date,ticker,open,high,low,close\n"
      "2020-01-02,AAA,10,11,9,10.5\n"
      "2020-01-02,AAA,10,11,9,10.5\n";
  CHECK_THROWS_AS(bt::parse_ohlc(csv), igl::MalformedRow);
}

TEST_CASE("loader validation") {
  CHECK_THROWS_AS(bt::parse_ohlc("date,ticker,open,high,low\n2020-01-02,A,1,1,1\n"), igl::InputError);
  CHECK_THROWS_AS(bt::parse_ohlc("date,ticker,open,high,low,close\n02/01/2020,A,1,1,1,1\n"), igl::MalformedRow);
  CHECK_THROWS_AS(bt::parse_ohlc("date,ticker,open,high,low,close\n2020-01-02,A,1,1,1,x\n"), igl::MalformedRow);
  CHECK_THROWS_AS(bt::parse_ohlc("date,ticker,open,high,low,close\n2020-01-02,A,0,1,0,1\n"), igl::MalformedRow);
  CHECK_THROWS_AS(bt::parse_ohlc("date,ticker,open,high,low,close\n"), igl::EmptyPanel);

  // Column order and case are free; an inconsistent bar is dropped with a warning.
  const std::string csv =
      "Close,Ticker,Date,Open,High,Low\n"
      "10.5,A,2020-01-02,10,11,9\n"
      "10.5,A,2020-01-03,10,10.2,9\n"
      "10.5,A,2020-01-06,10,11,9\n";
  std::vector<std::string> warnings;
  const auto p = bt::parse_ohlc(csv, &warnings);
  CHECK(p.days() == 2);
  CHECK(warnings.size() >= 1);
}

TEST_CASE("fixture shapes round-trip through CSV") {
  const auto panel = fixtures::ohlc_panel(600, 5, 1);
  const auto p = bt::parse_ohlc(fixtures::to_csv(panel));
  CHECK(p.days() == 600);
  CHECK(p.assets() == 5);
  for (const Matrix* m : {&p.open, &p.high, &p.low, &p.close}) {
    CHECK(m->rows() == 600);
    CHECK(m->cols() == 5);
  }
  CHECK((p.close - panel.close).cwiseAbs().maxCoeff() == 0.0);
  const auto t = bt::tail(p, 100);
  CHECK(t.days() == 100);
  CHECK(t.dates.front() == p.dates[500]);
}

TEST_CASE("intraday standardization") {
  bt::OhlcPanel p;
  p.dates = {"2020-01-02"};
  p.tickers = {"A"};
  p.open = Matrix::Constant(1, 1, 100);
  p.high = Matrix::Constant(1, 1, 102);
  p.low = Matrix::Constant(1, 1, 99);
  p.close = Matrix::Constant(1, 1, 101);
  auto r = bt::standardize_intraday(p);
  CHECK(r.high(0, 0) == doctest::Approx(0.02));
  CHECK(r.low(0, 0) == doctest::Approx(-0.01));
  CHECK(r.close(0, 0) == doctest::Approx(0.01));
  CHECK(r.mid(0, 0) == doctest::Approx(0.005));

  p.high = p.low = p.close = p.open;
  r = bt::standardize_intraday(p);
  CHECK(r.high(0, 0) == 0.0);
  CHECK(r.mid(0, 0) == 0.0);

  p.open(0, 0) = 0.0;
  CHECK_THROWS_AS(bt::standardize_intraday(p), igl::NonPositiveOpen);

  const auto f = bt::standardize_intraday(fixtures::ohlc_panel(100, 4, 2));
  CHECK((f.low.array() <= f.mid.array()).all());
  CHECK((f.mid.array() <= f.high.array()).all());
  CHECK((f.low.array() <= f.close.array()).all());
}

TEST_CASE("max-Sharpe weights") {
  const Matrix i2 = Matrix::Identity(2, 2);
  auto w = bt::max_sharpe_weights((Vector(2) << 0.1, 0.1).finished(), i2);
  CHECK(w(0) == doctest::Approx(0.5));
  CHECK(w(1) == doctest::Approx(0.5));
  w = bt::max_sharpe_weights((Vector(2) << 0.2, 0.1).finished(), i2);
  CHECK(w(0) == doctest::Approx(2.0 / 3));
  CHECK(w(1) == doctest::Approx(1.0 / 3));
  CHECK_THROWS_AS(bt::max_sharpe_weights((Vector(2) << 0.1, -0.1).finished(), i2), igl::DegenerateDenominator);
}

TEST_CASE("schedule arithmetic") {
  CHECK(bt::window_count(600, 252, 21) == 16);
  CHECK(bt::window_count(273, 252, 21) == 1);
  CHECK(bt::window_count(272, 252, 21) == 0);
  const auto panel = fixtures::ohlc_panel(300, 3, 3);
  CHECK_THROWS_AS(bt::rolling_backtest(bt::tail(panel, 260), bt::Strategy::one_over_n, {}), igl::InvalidConfig);
}

TEST_CASE("1/N backtest") {
  const auto panel = fixtures::ohlc_panel(600, 5, 4);
  const auto rep = bt::rolling_backtest(panel, bt::Strategy::one_over_n, {});
  REQUIRE(rep.windows.size() == 16);
  const Matrix cc = bt::close_to_close_returns(panel);
  for (std::size_t k = 0; k < rep.windows.size(); ++k) {
    const auto& w = rep.windows[k];
    CHECK(w.weights.size() == 5);
    CHECK((w.weights.array() - 0.2).abs().maxCoeff() == 0.0);
    CHECK(w.hold_first == 252 + 21 * static_cast<long>(k));
    CHECK(w.rebalance_date == panel.dates[w.hold_first - 1]);
    CHECK(w.returns.size() == 21);
    CHECK(w.returns[3] == doctest::Approx(cc.row(w.hold_first + 3).mean()).epsilon(1e-14));
  }
}

TEST_CASE("IGL strategies produce fully invested weights") {
  const auto panel = fixtures::ohlc_panel(400, 4, 5);
  bt::BacktestConfig cfg;
  cfg.grid_count = 10;
  const std::vector<bt::Strategy> all(std::begin(bt::kAllStrategies), std::end(bt::kAllStrategies));
  const auto a = bt::run_strategies(panel, all, cfg, 1);
  const auto b = bt::run_strategies(panel, all, cfg, 3);
  REQUIRE(a.size() == 6);
  for (std::size_t s = 0; s < a.size(); ++s) {
    CHECK(a[s].strategy == all[s]);
    for (std::size_t k = 0; k < a[s].windows.size(); ++k) {
      CHECK(std::abs(a[s].windows[k].weights.sum() - 1.0) < 1e-12);
      CHECK(a[s].windows[k].weights == b[s].windows[k].weights);
    }
  }
  CHECK(a[5].windows[0].lambda > 0.0);
}

TEST_CASE("block metrics") {
  auto m = bt::block_metrics(std::vector<double>(21, 0.001));
  CHECK(m.ann_return == doctest::Approx(0.252).epsilon(1e-12));
  CHECK(m.ann_vol == 0.0);
  CHECK_FALSE(m.sharpe.has_value());

  std::vector<double> alt;
  for (int i = 0; i < 21; ++i) alt.push_back(i % 2 == 0 ? 0.01 : -0.01);
  m = bt::block_metrics(alt);
  // 11 up days, 10 down days.
  const double mean = 0.01 / 21.0;
  double ss = 11 * std::pow(0.01 - mean, 2) + 10 * std::pow(-0.01 - mean, 2);
  const double sd = std::sqrt(ss / 20.0);
  CHECK(std::abs(m.ann_return - mean * 252) < 1e-12);
  CHECK(std::abs(m.ann_vol - sd * std::sqrt(252.0)) < 1e-12);
  REQUIRE(m.sharpe.has_value());
  CHECK(std::abs(*m.sharpe - mean * 252 / (sd * std::sqrt(252.0))) < 1e-12);
}

TEST_CASE("performance aggregates blocks") {
  bt::BacktestReport r;
  bt::WindowRecord a, b;
  a.returns = std::vector<double>(5, 0.001);
  b.returns = {0.01, -0.01, 0.02, 0.0, 0.01};
  r.windows = {a, b};
  const auto p = bt::performance(r);
  CHECK(p.blocks.size() == 2);
  CHECK(p.sharpe_blocks == 1);
  CHECK(p.sharpe == doctest::Approx(*p.blocks[1].sharpe));
  CHECK(p.ann_return == doctest::Approx((p.blocks[0].ann_return + p.blocks[1].ann_return) / 2));
  CHECK(p.pooled.sharpe.has_value());
  CHECK_THROWS_AS(bt::performance(bt::BacktestReport{}), igl::InvalidConfig);
}

TEST_CASE("strategy names") {
  CHECK(bt::to_string(bt::Strategy::one_over_n) == "1/N");
  CHECK(bt::to_string(bt::Strategy::close) == "Standard");
  CHECK(bt::parse_strategy("1/N") == bt::Strategy::one_over_n);
  CHECK(bt::parse_strategy("standard") == bt::Strategy::close);
  CHECK(bt::parse_strategy("Interval") == bt::Strategy::interval);
  CHECK_THROWS_AS(bt::parse_strategy("momentum"), igl::InvalidConfig);
}
