#pragma once

#include <functional>
#include <optional>

#include "igl/interval_data.hpp"

namespace igl {

// Penalty scale: lambda multiplies ||Theta||_1 in
//   lambda * ||Theta||_1 + Tr((S_l + S_u) Theta) - 2 log det Theta,
// which is twice the standard graphical lasso objective on the pooled
// covariance with penalty lambda / 2.
struct SolverConfig {
  double lambda = 0.1;
  // Duality-gap tolerance. Non-positive means "use 1e-6 * p".
  double epsilon = 0.0;
  int max_sweeps = 100;
  double inner_tol = 1e-7;
  int inner_max_iter = 1000;

  double lambda_tilde() const noexcept { return 0.5 * lambda; }
  double epsilon_for(Eigen::Index p) const noexcept {
    return epsilon > 0.0 ? epsilon : 1e-6 * static_cast<double>(p);
  }
};

/// Throws NonPositiveLambda / InvalidConfig.
void validate(const SolverConfig& cfg);

struct InnerConfig {
  double tol = 1e-7;
  int max_iter = 1000;
};

struct ColumnQpResult {
  Vector v;          // W_sub * beta, projected onto the box
  Vector beta;       // lasso solution
  int iterations = 0;
  bool converged = false;
};

/// Minimizer of v^T w_sub^{-1} v over the box ||v - s_col||_inf <= lambda_tilde,
/// obtained from the lasso 1/2 b^T w_sub b - s_col^T b + lambda_tilde ||b||_1.
/// `beta_start` warm-starts the coordinate descent.
ColumnQpResult column_qp(const Matrix& w_sub, const Vector& s_col, double lambda_tilde,
                         const InnerConfig& inner, const Vector* beta_start = nullptr);

struct IGLFit {
  double lambda = 0.0;
  Matrix sigma_hat;
  Matrix theta_hat;
  double gap = 0.0;
  int sweeps = 0;
  double objective = 0.0;
  bool converged = false;
  // Number of column subproblems whose coordinate descent hit inner_max_iter.
  int inner_not_converged = 0;
  // Lasso coefficients, column j holds the solution of subproblem j
  // (entry j is zero). Carried for warm starts along a path.
  Matrix betas;
  std::vector<double> gap_trace;
};

struct WarmStart {
  Matrix sigma;
  Matrix betas;
};

struct ColumnUpdateEvent {
  int sweep = 0;
  Eigen::Index column = 0;
  const Matrix& w;
};

// Called after every column update; used by instrumentation tests.
using ColumnObserver = std::function<void(const ColumnUpdateEvent&)>;

/// Block coordinate descent on the dual. Non-convergence is reported through
/// `converged`, not thrown. Throws NonPositiveLambda, NumericalBreakdown.
///
/// A warm start is accepted only if it is dual-feasible for this lambda;
/// otherwise the default start (S_bar + lambda/2 I) is used.
IGLFit igl_fit(const CovariancePair& cov, const SolverConfig& cfg,
               const WarmStart* warm = nullptr, const ColumnObserver& observer = {});

/// Tr((S_l + S_u) W^{-1}) - 2p + lambda ||W^{-1}||_1. Throws SingularMatrix.
double duality_gap(const Matrix& sigma_hat, const CovariancePair& cov, double lambda);

/// lambda ||Theta||_1 + Tr((S_l + S_u) Theta) - 2 log det Theta. Throws SingularMatrix.
double igl_objective(const Matrix& theta, const CovariancePair& cov, double lambda);

struct KKTReport {
  double max_stationarity_residual = 0.0;
  double max_feasibility_excess = 0.0;
  double min_eigenvalue_theta = 0.0;
  double max_eigenvalue_theta = 0.0;
};

inline constexpr double kDefaultZeroTol = 1e-8;

/// Subgradient residuals of S_bar - Sigma + lambda/2 Z = 0. Report-only.
KKTReport kkt_check(const IGLFit& fit, const CovariancePair& cov, double lambda,
                    double zero_tol = kDefaultZeroTol);

struct EigenBoundsCheck {
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  double max_eigenvalue = 0.0;
  bool pass = false;
};

/// (lambda p / 2 + lambda_max(S_bar))^{-1} <= lambda_max(Theta) <= 2p / lambda,
/// with 1e-8 slack on each side.
EigenBoundsCheck eigen_bounds_check(const IGLFit& fit, const CovariancePair& cov, double lambda);

/// Inverse of a symmetric PD matrix via Cholesky, symmetrized. Throws SingularMatrix.
Matrix spd_inverse(const Matrix& a);

/// log det of a symmetric PD matrix via Cholesky. Throws SingularMatrix.
double spd_log_det(const Matrix& a);

}  // namespace igl
