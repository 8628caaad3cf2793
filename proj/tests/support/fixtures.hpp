#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>
#include <string>

#include "igl/backtest.hpp"
#include "igl/interval_data.hpp"

namespace fixtures {

using igl::Matrix;
using igl::Vector;

inline Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& eng) {
  std::normal_distribution<double> nd;
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = nd(eng);
  return m;
}

// (1/m) G^T G with rows of G ~ N(0, scale), scale = I + B B^T / p.
inline Matrix wishart(Eigen::Index p, Eigen::Index m, const Matrix& chol_scale, std::mt19937_64& eng) {
  const Matrix g = normal_matrix(m, p, eng) * chol_scale.transpose();
  Matrix s = g.transpose() * g / static_cast<double>(m);
  return 0.5 * (s + s.transpose());
}

struct WishartPair {
  Matrix s_lower;
  Matrix s_upper;
};

inline WishartPair wishart_pair(Eigen::Index p, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  const Matrix b = normal_matrix(p, p, eng);
  const Matrix scale = Matrix::Identity(p, p) + b * b.transpose() / static_cast<double>(p);
  const Matrix l = scale.llt().matrixL();
  const Eigen::Index m = 2 * p + 5;
  WishartPair w;
  w.s_lower = wishart(p, m, l, eng);
  // Upper-bound covariance: same scale, inflated a little, independent draw.
  w.s_upper = 1.3 * wishart(p, m, l, eng);
  return w;
}

inline igl::CovariancePair wishart_cov(Eigen::Index p, std::uint64_t seed, Eigen::Index n = 100) {
  WishartPair w = wishart_pair(p, seed);
  return igl::covariance_pair_from(std::move(w.s_lower), std::move(w.s_upper), n);
}

inline std::string date_of(int k) {
  // Consecutive calendar days from 2000-01-01; weekends are irrelevant here.
  int y = 2000, m = 1, d = 1;
  static const int mdays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  for (int i = 0; i < k; ++i) {
    const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
    const int len = mdays[m - 1] + (m == 2 && leap ? 1 : 0);
    if (++d > len) {
      d = 1;
      if (++m > 12) {
        m = 1;
        ++y;
      }
    }
  }
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
  return buf;
}

// Random-walk OHLC panel with a common factor so assets are correlated.
inline igl::backtest::OhlcPanel ohlc_panel(int days, int assets, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  igl::backtest::OhlcPanel p;
  for (int a = 0; a < assets; ++a) p.tickers.push_back("A" + std::to_string(a));
  for (int t = 0; t < days; ++t) p.dates.push_back(date_of(t));
  p.open.resize(days, assets);
  p.high.resize(days, assets);
  p.low.resize(days, assets);
  p.close.resize(days, assets);
  Vector last = Vector::Constant(assets, 100.0);
  for (int t = 0; t < days; ++t) {
    const double market = 0.008 * nd(eng);
    for (int a = 0; a < assets; ++a) {
      const double open = last(a) * std::exp(0.002 * nd(eng));
      const double drift = 0.0003 * (a + 1);
      const double close = open * std::exp(drift + market + 0.01 * nd(eng));
      const double hi = std::max(open, close) * (1.0 + 0.006 * ud(eng));
      const double lo = std::min(open, close) * (1.0 - 0.006 * ud(eng));
      p.open(t, a) = open;
      p.close(t, a) = close;
      p.high(t, a) = hi;
      p.low(t, a) = lo;
      last(a) = close;
    }
  }
  return p;
}

// high = low = close and open = previous close: every return source coincides.
inline igl::backtest::OhlcPanel zero_width_panel(int days, int assets, std::uint64_t seed) {
  igl::backtest::OhlcPanel p = ohlc_panel(days, assets, seed);
  for (int t = 0; t < days; ++t) {
    for (int a = 0; a < assets; ++a) {
      p.open(t, a) = t == 0 ? 100.0 : p.close(t - 1, a);
      p.high(t, a) = p.close(t, a);
      p.low(t, a) = p.close(t, a);
    }
  }
  return p;
}

inline std::string to_csv(const igl::backtest::OhlcPanel& p) {
  std::ostringstream out;
  out.precision(17);
  out << "date,ticker,open,high,low,close\n";
  for (Eigen::Index t = 0; t < p.days(); ++t) {
    for (Eigen::Index a = 0; a < p.assets(); ++a) {
      out << p.dates[t] << ',' << p.tickers[a] << ',' << p.open(t, a) << ',' << p.high(t, a) << ','
          << p.low(t, a) << ',' << p.close(t, a) << '\n';
    }
  }
  return out.str();
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("igl_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fixtures
