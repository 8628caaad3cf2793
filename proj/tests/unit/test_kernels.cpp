#include <doctest.h>

#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "igl/kernels.hpp"

using Eigen::MatrixXd;

namespace {

MatrixXd random(Eigen::Index r, Eigen::Index c, unsigned seed) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> nd(1.0, 2.0);
  MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = nd(eng);
  return m;
}

}  // namespace

TEST_CASE("parallel kernels agree bit-for-bit with the serial reference") {
#ifdef _OPENMP
  omp_set_num_threads(4);
#endif
  for (Eigen::Index p : {5, 64, 65, 130}) {
    const MatrixXd x = random(97, p, static_cast<unsigned>(p));
    const auto mean = igl::kernels::column_means(x);
    const MatrixXd a = igl::kernels::centered_gram_serial(x, mean);
    const MatrixXd b = igl::kernels::centered_gram_parallel(x, mean);
    CHECK(a == b);
    CHECK(a == a.transpose());
    CHECK(igl::kernels::trace_product_serial(a, b) == igl::kernels::trace_product_parallel(a, b));
    CHECK(igl::kernels::abs_sum_serial(x.leftCols(p)) == igl::kernels::abs_sum_parallel(x.leftCols(p)));
  }
}

TEST_CASE("gram kernel matches the Eigen expression") {
  const MatrixXd x = random(50, 7, 1);
  const auto mean = igl::kernels::column_means(x);
  const MatrixXd c = x.rowwise() - mean.transpose();
  const MatrixXd ref = c.transpose() * c / 50.0;
  CHECK((igl::kernels::centered_gram_serial(x, mean) - ref).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((mean - x.colwise().mean().transpose()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("trace product and abs sum") {
  const MatrixXd a = random(6, 6, 2), b = random(6, 6, 3);
  const MatrixXd sa = a + a.transpose(), sb = b + b.transpose();
  CHECK(igl::kernels::trace_product_serial(sa, sb) == doctest::Approx((sa * sb).trace()).epsilon(1e-12));
  CHECK(igl::kernels::abs_sum_serial(a) == doctest::Approx(a.cwiseAbs().sum()).epsilon(1e-14));
  CHECK(igl::kernels::max_threads() >= 1);
}
