#include "igl/kernels.hpp"

#include <cmath>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace igl::kernels {

using Eigen::Index;

Eigen::VectorXd column_means(const Eigen::MatrixXd& x) {
  const Index n = x.rows();
  Eigen::VectorXd mean(x.cols());
  for (Index j = 0; j < x.cols(); ++j) {
    double s = 0.0;
    for (Index i = 0; i < n; ++i) s += x(i, j);
    mean(j) = s / static_cast<double>(n);
  }
  return mean;
}

namespace {

Eigen::MatrixXd center(const Eigen::MatrixXd& x, const Eigen::VectorXd& mean) {
  Eigen::MatrixXd c = x;
  for (Index j = 0; j < x.cols(); ++j) c.col(j).array() -= mean(j);
  return c;
}

// Entry (j, k) of the centered Gram matrix, accumulated in row order.
inline double gram_entry(const Eigen::MatrixXd& c, Index j, Index k) {
  const double* a = c.col(j).data();
  const double* b = c.col(k).data();
  double s = 0.0;
  for (Index i = 0; i < c.rows(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

Eigen::MatrixXd centered_gram_serial(const Eigen::MatrixXd& x, const Eigen::VectorXd& mean) {
  const Eigen::MatrixXd c = center(x, mean);
  const Index p = x.cols();
  const double inv_n = 1.0 / static_cast<double>(x.rows());
  Eigen::MatrixXd g(p, p);
  for (Index k = 0; k < p; ++k) {
    for (Index j = k; j < p; ++j) {
      const double v = gram_entry(c, j, k) * inv_n;
      g(j, k) = v;
      g(k, j) = v;
    }
  }
  return g;
}

Eigen::MatrixXd centered_gram_parallel(const Eigen::MatrixXd& x, const Eigen::VectorXd& mean) {
  const Index p = x.cols();
  if (p < kParallelThreshold) return centered_gram_serial(x, mean);
  const Eigen::MatrixXd c = center(x, mean);
  const double inv_n = 1.0 / static_cast<double>(x.rows());
  Eigen::MatrixXd g(p, p);
#pragma omp parallel for schedule(dynamic, 4)
  for (Index k = 0; k < p; ++k) {
    for (Index j = k; j < p; ++j) {
      const double v = gram_entry(c, j, k) * inv_n;
      g(j, k) = v;
      g(k, j) = v;
    }
  }
  return g;
}

namespace {

template <class ColumnFn>
double fixed_order_sum(Index cols, ColumnFn&& column_sum, bool parallel) {
  std::vector<double> partial(static_cast<std::size_t>(cols));
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (Index j = 0; j < cols; ++j) partial[static_cast<std::size_t>(j)] = column_sum(j);
  } else {
    for (Index j = 0; j < cols; ++j) partial[static_cast<std::size_t>(j)] = column_sum(j);
  }
  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

}  // namespace

double trace_product_serial(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return fixed_order_sum(a.cols(), [&](Index j) { return a.col(j).dot(b.col(j)); }, false);
}

double trace_product_parallel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return fixed_order_sum(a.cols(), [&](Index j) { return a.col(j).dot(b.col(j)); },
                         a.cols() >= kParallelThreshold);
}

double abs_sum_serial(const Eigen::MatrixXd& a) {
  return fixed_order_sum(a.cols(), [&](Index j) { return a.col(j).cwiseAbs().sum(); }, false);
}

double abs_sum_parallel(const Eigen::MatrixXd& a) {
  return fixed_order_sum(a.cols(), [&](Index j) { return a.col(j).cwiseAbs().sum(); },
                         a.cols() >= kParallelThreshold);
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace igl::kernels
