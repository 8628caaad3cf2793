#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace igl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// n x p panel of interval observations [lower_ij, upper_ij].
// Construct through validate_intervals; the invariants below hold for every
// instance obtained that way.
//   - lower and upper share shape n x p, n >= 2, p >= 1
//   - every entry is finite and lower_ij <= upper_ij
class IntervalMatrix {
 public:
  IntervalMatrix() = default;

  Eigen::Index n() const noexcept { return lower_.rows(); }
  Eigen::Index p() const noexcept { return lower_.cols(); }

  const Matrix& lower() const noexcept { return lower_; }
  const Matrix& upper() const noexcept { return upper_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  /// Midpoint panel (lower + upper) / 2.
  Matrix midpoints() const { return 0.5 * (lower_ + upper_); }

 private:
  friend IntervalMatrix validate_intervals(Matrix, Matrix, std::vector<std::string>);
  Matrix lower_;
  Matrix upper_;
  std::vector<std::string> labels_;
};

/// Checks shape, finiteness, and lower <= upper, then takes ownership.
/// Zero-width intervals are allowed. Labels, when given, must have p entries.
/// Throws ShapeMismatch, NonFiniteEntry, BoundViolation, InsufficientSamples.
IntervalMatrix validate_intervals(Matrix lower, Matrix upper, std::vector<std::string> labels = {});

struct CovariancePair {
  Matrix s_lower;
  Matrix s_upper;
  Matrix pooled;
  Vector mean_lower;
  Vector mean_upper;
  Eigen::Index n = 0;

  Eigen::Index p() const noexcept { return pooled.rows(); }
};

/// MLE (1/n) covariances of the lower and upper bound samples around their
/// column means, and the pooled average. Outputs are exactly symmetric.
CovariancePair bound_covariances(const IntervalMatrix& x);

/// (s_lower + s_upper) / 2. Throws ShapeMismatch.
Matrix pooled_covariance(const Matrix& s_lower, const Matrix& s_upper);

/// Builds a CovariancePair from already-computed bound covariances
/// (no raw data). Means are left empty.
CovariancePair covariance_pair_from(Matrix s_lower, Matrix s_upper, Eigen::Index n);

void symmetrize(Matrix& a);

}  // namespace igl
