#pragma once

#include <string>
#include <vector>

#include "igl/solver.hpp"

namespace igl {

struct LambdaGrid {
  std::vector<double> values;  // strictly decreasing
  // True when the pooled covariance had no off-diagonal signal and the
  // fixed fallback grid on [1e-3, 1] was returned.
  bool degenerate = false;
};

inline constexpr int kDefaultGridCount = 50;
inline constexpr double kDefaultGridRatio = 0.01;

/// Log-spaced grid from lambda_max = 2 max_{i != j} |S_bar_ij| down to
/// ratio * lambda_max. Throws InvalidConfig for count < 2 or ratio outside (0, 1).
LambdaGrid lambda_grid(const Matrix& pooled, int count = kDefaultGridCount,
                       double ratio = kDefaultGridRatio);

/// Count of entries (i <= j) with |theta_ij| > zero_tol.
long degrees_of_freedom(const Matrix& theta, double zero_tol = kDefaultZeroTol);

/// n (Tr((S_l + S_u) Theta) - 2 log det Theta) + k log n. Throws SingularMatrix.
double bic_int(const IGLFit& fit, const CovariancePair& cov, Eigen::Index n,
               double zero_tol = kDefaultZeroTol);

struct PathEntry {
  IGLFit fit;
  double bic = 0.0;
  long k = 0;
  // False when the fit threw; such entries are excluded from selection.
  bool ok = true;
  std::string error;
};

struct PathResult {
  std::vector<double> grid;
  std::vector<PathEntry> entries;
  std::vector<double> bic;
  int selected_index = -1;

  const IGLFit& selected() const { return entries.at(static_cast<std::size_t>(selected_index)).fit; }
};

struct PathOptions {
  bool warm_start = true;
  double zero_tol = kDefaultZeroTol;
};

/// Fits every lambda of `grid` (largest first) and picks the argmin of
/// bic_int, ties toward the larger lambda. `cfg.lambda` is ignored.
/// Cold mode fits each lambda independently (OpenMP-parallel when enabled).
/// Throws InvalidConfig on an empty or non-decreasing grid, and
/// NumericalError when every fit failed.
PathResult select_lambda(const CovariancePair& cov, const std::vector<double>& grid, Eigen::Index n,
                         const SolverConfig& cfg, const PathOptions& opts = {});

}  // namespace igl
