#include "igl/model_selection.hpp"

#include <cmath>
#include <limits>

#include "igl/errors.hpp"
#include "igl/kernels.hpp"

namespace igl {

using Eigen::Index;

LambdaGrid lambda_grid(const Matrix& pooled, int count, double ratio) {
  if (count < 2) throw InvalidConfig("lambda grid needs count >= 2");
  if (!(ratio > 0.0 && ratio < 1.0)) throw InvalidConfig("lambda grid ratio must be in (0, 1)");
  double max_off = 0.0;
  for (Index j = 0; j < pooled.cols(); ++j) {
    for (Index i = 0; i < pooled.rows(); ++i) {
      if (i != j) max_off = std::max(max_off, std::abs(pooled(i, j)));
    }
  }
  LambdaGrid grid;
  double hi = 2.0 * max_off;
  double lo = ratio * hi;
  if (!(max_off > 0.0)) {
    grid.degenerate = true;
    hi = 1.0;
    lo = 1e-3;
  }
  const double log_hi = std::log(hi);
  const double step = (std::log(lo) - log_hi) / static_cast<double>(count - 1);
  grid.values.reserve(static_cast<std::size_t>(count));
  grid.values.push_back(hi);
  for (int k = 1; k < count - 1; ++k) grid.values.push_back(std::exp(log_hi + step * k));
  grid.values.push_back(lo);
  return grid;
}

long degrees_of_freedom(const Matrix& theta, double zero_tol) {
  long k = 0;
  for (Index j = 0; j < theta.cols(); ++j) {
    for (Index i = 0; i <= j; ++i) {
      if (std::abs(theta(i, j)) > zero_tol) ++k;
    }
  }
  return k;
}

double bic_int(const IGLFit& fit, const CovariancePair& cov, Index n, double zero_tol) {
  const Matrix s_sum = cov.s_lower + cov.s_upper;
  const double nn = static_cast<double>(n);
  const double fit_term =
      kernels::trace_product_parallel(s_sum, fit.theta_hat) - 2.0 * spd_log_det(fit.theta_hat);
  return nn * fit_term + static_cast<double>(degrees_of_freedom(fit.theta_hat, zero_tol)) * std::log(nn);
}

namespace {

void score(PathEntry& e, const CovariancePair& cov, Index n, double zero_tol) {
  try {
    e.k = degrees_of_freedom(e.fit.theta_hat, zero_tol);
    e.bic = bic_int(e.fit, cov, n, zero_tol);
  } catch (const Error& ex) {
    e.ok = false;
    e.error = ex.what();
    e.bic = std::numeric_limits<double>::quiet_NaN();
  }
}

PathEntry fit_one(const CovariancePair& cov, const SolverConfig& base, double lambda,
                  const WarmStart* warm) {
  PathEntry e;
  SolverConfig cfg = base;
  cfg.lambda = lambda;
  try {
    e.fit = igl_fit(cov, cfg, warm);
  } catch (const Error& ex) {
    e.ok = false;
    e.error = ex.what();
    e.fit.lambda = lambda;
  }
  return e;
}

}  // namespace

PathResult select_lambda(const CovariancePair& cov, const std::vector<double>& grid, Index n,
                         const SolverConfig& cfg, const PathOptions& opts) {
  if (grid.empty()) throw InvalidConfig("lambda grid is empty");
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] < grid[k - 1])) throw InvalidConfig("lambda grid must be strictly decreasing");
  }
  PathResult res;
  res.grid = grid;
  res.entries.resize(grid.size());

  if (opts.warm_start) {
    WarmStart warm;
    bool have_warm = false;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      PathEntry& e = res.entries[k];
      e = fit_one(cov, cfg, grid[k], have_warm ? &warm : nullptr);
      if (e.ok) {
        score(e, cov, n, opts.zero_tol);
        warm.sigma = e.fit.sigma_hat;
        warm.betas = e.fit.betas;
        have_warm = true;
      }
    }
  } else {
    const auto count = static_cast<long>(grid.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (long k = 0; k < count; ++k) {
      PathEntry& e = res.entries[static_cast<std::size_t>(k)];
      e = fit_one(cov, cfg, grid[static_cast<std::size_t>(k)], nullptr);
      if (e.ok) score(e, cov, n, opts.zero_tol);
    }
  }

  res.bic.reserve(grid.size());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const PathEntry& e = res.entries[k];
    res.bic.push_back(e.bic);
    if (e.ok && e.bic < best) {
      best = e.bic;
      res.selected_index = static_cast<int>(k);
    }
  }
  if (res.selected_index < 0) throw NumericalError("every fit on the lambda path failed");
  return res;
}

}  // namespace igl
