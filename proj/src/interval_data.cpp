#include "igl/interval_data.hpp"

#include <cmath>
#include <utility>

#include "igl/errors.hpp"
#include "igl/kernels.hpp"

namespace igl {

void symmetrize(Matrix& a) {
  const Eigen::Index p = a.rows();
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = j + 1; i < p; ++i) {
      const double v = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = v;
      a(j, i) = v;
    }
  }
}

IntervalMatrix validate_intervals(Matrix lower, Matrix upper, std::vector<std::string> labels) {
  if (lower.rows() != upper.rows() || lower.cols() != upper.cols()) {
    throw ShapeMismatch("lower is " + std::to_string(lower.rows()) + "x" +
                        std::to_string(lower.cols()) + " but upper is " +
                        std::to_string(upper.rows()) + "x" + std::to_string(upper.cols()));
  }
  if (lower.cols() < 1) throw ShapeMismatch("interval panel has no variables");
  if (!labels.empty() && static_cast<Eigen::Index>(labels.size()) != lower.cols()) {
    throw ShapeMismatch("label count does not match variable count");
  }
  for (Eigen::Index j = 0; j < lower.cols(); ++j) {
    for (Eigen::Index i = 0; i < lower.rows(); ++i) {
      if (!std::isfinite(lower(i, j)) || !std::isfinite(upper(i, j))) {
        throw NonFiniteEntry("non-finite bound at (" + std::to_string(i) + ", " +
                             std::to_string(j) + ")");
      }
      if (lower(i, j) > upper(i, j)) {
        throw BoundViolation(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      }
    }
  }
  IntervalMatrix x;
  x.lower_ = std::move(lower);
  x.upper_ = std::move(upper);
  x.labels_ = std::move(labels);
  return x;
}

CovariancePair bound_covariances(const IntervalMatrix& x) {
  if (x.n() < 2) throw InsufficientSamples("bound covariances need n >= 2");
  CovariancePair cov;
  cov.n = x.n();
  cov.mean_lower = kernels::column_means(x.lower());
  cov.mean_upper = kernels::column_means(x.upper());
  cov.s_lower = kernels::centered_gram_parallel(x.lower(), cov.mean_lower);
  cov.s_upper = kernels::centered_gram_parallel(x.upper(), cov.mean_upper);
  cov.pooled = pooled_covariance(cov.s_lower, cov.s_upper);
  return cov;
}

Matrix pooled_covariance(const Matrix& s_lower, const Matrix& s_upper) {
  if (s_lower.rows() != s_upper.rows() || s_lower.cols() != s_upper.cols() ||
      s_lower.rows() != s_lower.cols()) {
    throw ShapeMismatch("pooled covariance needs two square matrices of equal shape");
  }
  Matrix pooled = 0.5 * (s_lower + s_upper);
  symmetrize(pooled);
  return pooled;
}

CovariancePair covariance_pair_from(Matrix s_lower, Matrix s_upper, Eigen::Index n) {
  CovariancePair cov;
  symmetrize(s_lower);
  symmetrize(s_upper);
  cov.pooled = pooled_covariance(s_lower, s_upper);
  cov.s_lower = std::move(s_lower);
  cov.s_upper = std::move(s_upper);
  cov.n = n;
  return cov;
}

}  // namespace igl
