#pragma once

// Data-parallel kernels. Each kernel has a serial reference with the same
// contract; the parallel variant must agree with it bit-for-bit because
// every output entry is reduced in the same fixed order by one thread.

#include <Eigen/Dense>

namespace igl::kernels {

/// Column means of x (n x p).
Eigen::VectorXd column_means(const Eigen::MatrixXd& x);

/// (1/n) * (x - 1 mean^T)^T (x - 1 mean^T), using caller-supplied means.
Eigen::MatrixXd centered_gram_serial(const Eigen::MatrixXd& x, const Eigen::VectorXd& mean);
Eigen::MatrixXd centered_gram_parallel(const Eigen::MatrixXd& x, const Eigen::VectorXd& mean);

/// Tr(A B) for symmetric A, B, computed as sum_ij a_ij b_ij.
double trace_product_serial(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
double trace_product_parallel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Entrywise absolute sum.
double abs_sum_serial(const Eigen::MatrixXd& a);
double abs_sum_parallel(const Eigen::MatrixXd& a);

/// Largest p for which the parallel kernels fall back to serial because
/// thread start-up would dominate.
inline constexpr Eigen::Index kParallelThreshold = 64;

/// Number of OpenMP threads available (1 without OpenMP).
int max_threads();

}  // namespace igl::kernels
