#include "igl/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "igl/errors.hpp"
#include "igl/kernels.hpp"

namespace igl {

using Eigen::Index;

void validate(const SolverConfig& cfg) {
  if (!(cfg.lambda > 0.0) || !std::isfinite(cfg.lambda)) {
    throw NonPositiveLambda("lambda must be positive and finite, got " + std::to_string(cfg.lambda));
  }
  if (cfg.epsilon < 0.0 || !std::isfinite(cfg.epsilon)) {
    throw InvalidConfig("epsilon must be positive (or 0 for the default)");
  }
  if (cfg.max_sweeps < 1) throw InvalidConfig("max_sweeps must be positive");
  if (!(cfg.inner_tol > 0.0)) throw InvalidConfig("inner_tol must be positive");
  if (cfg.inner_max_iter < 1) throw InvalidConfig("inner_max_iter must be positive");
}

Matrix spd_inverse(const Matrix& a) {
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) throw SingularMatrix("matrix is not positive definite");
  Matrix inv = llt.solve(Matrix::Identity(a.rows(), a.cols()));
  if (!inv.allFinite()) throw SingularMatrix("inverse is not finite");
  symmetrize(inv);
  return inv;
}

double spd_log_det(const Matrix& a) {
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) throw SingularMatrix("matrix is not positive definite");
  const auto& l = llt.matrixLLT();
  double s = 0.0;
  for (Index i = 0; i < a.rows(); ++i) {
    const double d = l(i, i);
    if (!(d > 0.0)) throw SingularMatrix("non-positive Cholesky pivot");
    s += std::log(d);
  }
  return 2.0 * s;
}

namespace {

inline double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

struct CdOutcome {
  int iterations = 0;
  bool converged = false;
};

// Cyclic coordinate descent for
//   1/2 b^T W b - s^T b + t ||b||_1
// restricted to indices != skip (pass skip = -1 to use all of W).
// `beta` is in/out and has entry `skip` held at zero.
CdOutcome lasso_cd(const Matrix& w, Index skip, const Vector& s, double t, const InnerConfig& inner,
                   Vector& beta, Vector& resid) {
  const Index p = w.rows();
  resid = s;
  for (Index k = 0; k < p; ++k) {
    if (k == skip || beta(k) == 0.0) continue;
    resid.noalias() -= beta(k) * w.col(k);
  }
  CdOutcome out;
  for (int it = 1; it <= inner.max_iter; ++it) {
    double max_change = 0.0;
    for (Index i = 0; i < p; ++i) {
      if (i == skip) continue;
      const double wii = w(i, i);
      const double old = beta(i);
      const double updated = soft_threshold(resid(i) + wii * old, t) / wii;
      const double delta = updated - old;
      if (delta != 0.0) {
        beta(i) = updated;
        resid.noalias() -= delta * w.col(i);
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    out.iterations = it;
    if (max_change < inner.tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

// V = W beta over indices != skip, then clipped into the box around s.
void box_projected_product(const Matrix& w, Index skip, const Vector& beta, const Vector& s, double t,
                           Vector& v) {
  const Index p = w.rows();
  v.setZero(p);
  for (Index k = 0; k < p; ++k) {
    if (k == skip || beta(k) == 0.0) continue;
    v.noalias() += beta(k) * w.col(k);
  }
  for (Index i = 0; i < p; ++i) {
    if (i == skip) {
      v(i) = 0.0;
      continue;
    }
    v(i) = std::clamp(v(i), s(i) - t, s(i) + t);
  }
}

// Returns W if it can seed the dual iteration for this lambda: diagonal reset
// to S_bar + t, off-diagonals clipped into the box, and still PD.
std::optional<Matrix> feasible_warm_start(const Matrix& warm, const Matrix& pooled, double t) {
  const Index p = pooled.rows();
  if (warm.rows() != p || warm.cols() != p || !warm.allFinite()) return std::nullopt;
  Matrix w = warm;
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < p; ++i) {
      if (i == j) {
        w(i, i) = pooled(i, i) + t;
      } else {
        w(i, j) = std::clamp(w(i, j), pooled(i, j) - t, pooled(i, j) + t);
      }
    }
  }
  symmetrize(w);
  Eigen::LLT<Matrix> llt(w);
  if (llt.info() != Eigen::Success) return std::nullopt;
  return w;
}

}  // namespace

ColumnQpResult column_qp(const Matrix& w_sub, const Vector& s_col, double lambda_tilde,
                         const InnerConfig& inner, const Vector* beta_start) {
  if (w_sub.rows() != w_sub.cols() || w_sub.rows() != s_col.size()) {
    throw ShapeMismatch("column_qp: w_sub and s_col sizes disagree");
  }
  if (!(lambda_tilde > 0.0)) throw NonPositiveLambda("column_qp: lambda_tilde must be positive");
  ColumnQpResult res;
  res.beta = (beta_start != nullptr && beta_start->size() == s_col.size())
                 ? *beta_start
                 : Vector::Zero(s_col.size());
  Vector resid;
  const CdOutcome cd = lasso_cd(w_sub, -1, s_col, lambda_tilde, inner, res.beta, resid);
  res.iterations = cd.iterations;
  res.converged = cd.converged;
  box_projected_product(w_sub, -1, res.beta, s_col, lambda_tilde, res.v);
  return res;
}

double duality_gap(const Matrix& sigma_hat, const CovariancePair& cov, double lambda) {
  const Matrix theta = spd_inverse(sigma_hat);
  const Matrix s_sum = cov.s_lower + cov.s_upper;
  const double p = static_cast<double>(sigma_hat.rows());
  return kernels::trace_product_parallel(s_sum, theta) - 2.0 * p +
         lambda * kernels::abs_sum_parallel(theta);
}

double igl_objective(const Matrix& theta, const CovariancePair& cov, double lambda) {
  const Matrix s_sum = cov.s_lower + cov.s_upper;
  return lambda * kernels::abs_sum_parallel(theta) + kernels::trace_product_parallel(s_sum, theta) -
         2.0 * spd_log_det(theta);
}

IGLFit igl_fit(const CovariancePair& cov, const SolverConfig& cfg, const WarmStart* warm,
               const ColumnObserver& observer) {
  validate(cfg);
  const Index p = cov.p();
  if (p < 1 || cov.s_lower.rows() != p || cov.s_upper.rows() != p) {
    throw ShapeMismatch("igl_fit: covariance pair is malformed");
  }
  const double t = cfg.lambda_tilde();
  const double eps = cfg.epsilon_for(p);
  const Matrix& pooled = cov.pooled;
  const InnerConfig inner{cfg.inner_tol, cfg.inner_max_iter};

  Matrix w = pooled;
  w.diagonal().array() += t;
  Matrix betas = Matrix::Zero(p, p);
  if (warm != nullptr) {
    if (auto seeded = feasible_warm_start(warm->sigma, pooled, t)) w = std::move(*seeded);
    if (warm->betas.rows() == p && warm->betas.cols() == p) {
      betas = warm->betas;
      betas.diagonal().setZero();
    }
  }

  IGLFit fit;
  fit.lambda = cfg.lambda;
  Matrix best_w = w;
  Matrix best_betas = betas;
  double best_gap = std::numeric_limits<double>::infinity();

  Vector beta(p);
  Vector resid(p);
  Vector v(p);
  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    for (Index j = 0; j < p; ++j) {
      if (p == 1) break;
      beta = betas.col(j);
      const Vector s_col = pooled.col(j);
      const CdOutcome cd = lasso_cd(w, j, s_col, t, inner, beta, resid);
      if (!cd.converged) ++fit.inner_not_converged;
      box_projected_product(w, j, beta, s_col, t, v);

      const double schur = w(j, j) - v.dot(beta);
      if (!(schur > 0.0)) {
        throw NumericalBreakdown("non-positive Schur complement " + std::to_string(schur) +
                                 " at column " + std::to_string(j) + ", sweep " +
                                 std::to_string(sweep));
      }
      for (Index i = 0; i < p; ++i) {
        if (i == j) continue;
        w(i, j) = v(i);
        w(j, i) = v(i);
      }
      betas.col(j) = beta;
      if (observer) observer(ColumnUpdateEvent{sweep, j, w});
    }
    fit.sweeps = sweep;
    const double gap = duality_gap(w, cov, cfg.lambda);
    fit.gap_trace.push_back(gap);
    if (gap < best_gap) {
      best_gap = gap;
      best_w = w;
      best_betas = betas;
    }
    if (gap <= eps) {
      fit.converged = true;
      break;
    }
  }

  fit.sigma_hat = std::move(best_w);
  fit.betas = std::move(best_betas);
  fit.gap = best_gap;
  fit.theta_hat = spd_inverse(fit.sigma_hat);
  // Entries both column subproblems certify as zero are exact zeros; the
  // factorization leaves roundoff-level residue there.
  for (Index j = 0; j < p; ++j) {
    for (Index i = j + 1; i < p; ++i) {
      if (fit.betas(i, j) == 0.0 && fit.betas(j, i) == 0.0) {
        fit.theta_hat(i, j) = 0.0;
        fit.theta_hat(j, i) = 0.0;
      }
    }
  }
  try {
    fit.objective = igl_objective(fit.theta_hat, cov, cfg.lambda);
  } catch (const SingularMatrix&) {
    fit.objective = std::numeric_limits<double>::quiet_NaN();
  }
  return fit;
}

KKTReport kkt_check(const IGLFit& fit, const CovariancePair& cov, double lambda, double zero_tol) {
  const double t = 0.5 * lambda;
  const Index p = cov.p();
  KKTReport rep;
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < p; ++i) {
      const double g = cov.pooled(i, j) - fit.sigma_hat(i, j);
      const double th = fit.theta_hat(i, j);
      if (std::abs(th) > zero_tol) {
        const double sign = th > 0.0 ? 1.0 : -1.0;
        rep.max_stationarity_residual = std::max(rep.max_stationarity_residual, std::abs(g + t * sign));
      } else {
        rep.max_feasibility_excess = std::max(rep.max_feasibility_excess, std::abs(g) - t);
      }
    }
  }
  rep.max_feasibility_excess = std::max(rep.max_feasibility_excess, 0.0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(fit.theta_hat, Eigen::EigenvaluesOnly);
  rep.min_eigenvalue_theta = es.eigenvalues()(0);
  rep.max_eigenvalue_theta = es.eigenvalues()(p - 1);
  return rep;
}

EigenBoundsCheck eigen_bounds_check(const IGLFit& fit, const CovariancePair& cov, double lambda) {
  const double p = static_cast<double>(cov.p());
  Eigen::SelfAdjointEigenSolver<Matrix> es_s(cov.pooled, Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Matrix> es_t(fit.theta_hat, Eigen::EigenvaluesOnly);
  EigenBoundsCheck chk;
  chk.lower_bound = 1.0 / (lambda * p / 2.0 + es_s.eigenvalues().maxCoeff());
  chk.upper_bound = 2.0 * p / lambda;
  chk.max_eigenvalue = es_t.eigenvalues().maxCoeff();
  constexpr double slack = 1e-8;
  chk.pass = chk.max_eigenvalue >= chk.lower_bound - slack &&
             chk.max_eigenvalue <= chk.upper_bound + slack;
  return chk;
}

}  // namespace igl
