#include <doctest.h>

#include <cmath>

#include "../support/fixtures.hpp"
#include "igl/errors.hpp"
#include "igl/model_selection.hpp"
#include "igl/simulation.hpp"

using igl::Matrix;

TEST_CASE("lambda grid log spacing") {
  Matrix s(2, 2);
  s << 1, .3, .3, 1;
  const auto g = igl::lambda_grid(s, 3, 0.01);
  REQUIRE(g.values.size() == 3);
  CHECK_FALSE(g.degenerate);
  CHECK(g.values[0] == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(g.values[1] == doctest::Approx(0.06).epsilon(1e-14));
  CHECK(g.values[2] == doctest::Approx(0.006).epsilon(1e-14));

  const auto d = igl::lambda_grid(Matrix::Identity(3, 3));
  CHECK(d.degenerate);
  CHECK(d.values.front() == 1.0);
  CHECK(d.values.back() == 1e-3);
  CHECK(d.values.size() == 50);
  for (std::size_t k = 1; k < d.values.size(); ++k) CHECK(d.values[k] < d.values[k - 1]);

  CHECK_THROWS_AS(igl::lambda_grid(s, 1, 0.01), igl::InvalidConfig);
  CHECK_THROWS_AS(igl::lambda_grid(s, 5, 1.0), igl::InvalidConfig);
  CHECK_THROWS_AS(igl::lambda_grid(s, 5, 0.0), igl::InvalidConfig);
}

TEST_CASE("the first grid value gives a diagonal fit") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto cov = fixtures::wishart_cov(7, seed);
    const auto g = igl::lambda_grid(cov.pooled, 10);
    igl::SolverConfig cfg;
    cfg.lambda = g.values[0];
    const auto fit = igl::igl_fit(cov, cfg);
    Matrix off = fit.theta_hat;
    off.diagonal().setZero();
    CHECK(off.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("BIC hand evaluations") {
  const auto cov = igl::covariance_pair_from(Matrix::Identity(2, 2), Matrix::Identity(2, 2), 100);
  igl::IGLFit fit;
  fit.theta_hat = 0.8 * Matrix::Identity(2, 2);
  CHECK(igl::bic_int(fit, cov, 100) == doctest::Approx(418.47).epsilon(0.01 / 418.47));
  const double exact = 100 * (3.2 - 4 * std::log(0.8)) + 2 * std::log(100.0);
  CHECK(igl::bic_int(fit, cov, 100) == doctest::Approx(exact).epsilon(1e-13));
  // Tr((S_l + S_u) I) = 4, so 100 * 4 + 2 log 100.
  fit.theta_hat = Matrix::Identity(2, 2);
  CHECK(igl::bic_int(fit, cov, 100) == doctest::Approx(409.21).epsilon(0.01 / 409.21));
}

TEST_CASE("degrees of freedom counts the upper triangle") {
  Matrix t = Matrix::Identity(3, 3);
  t(0, 2) = t(2, 0) = 0.5;
  t(0, 1) = t(1, 0) = 1e-9;
  CHECK(igl::degrees_of_freedom(t) == 4);
  CHECK(igl::degrees_of_freedom(t, 1e-10) == 5);
}

TEST_CASE("selection on the degenerate grid returns a diagonal fit") {
  const auto cov = igl::covariance_pair_from(Matrix::Identity(4, 4), Matrix::Identity(4, 4), 60);
  const auto g = igl::lambda_grid(cov.pooled, 8);
  const auto path = igl::select_lambda(cov, g.values, 60, igl::SolverConfig{});
  Matrix off = path.selected().theta_hat;
  off.diagonal().setZero();
  CHECK(off.isZero(0.0));
  CHECK(path.bic.size() == 8);
}

TEST_CASE("single-value grid selects it") {
  const auto cov = fixtures::wishart_cov(5, 1);
  const auto path = igl::select_lambda(cov, {0.3}, 100, igl::SolverConfig{});
  CHECK(path.selected_index == 0);
  CHECK(path.selected().lambda == 0.3);
}

TEST_CASE("path validation") {
  const auto cov = fixtures::wishart_cov(4, 2);
  CHECK_THROWS_AS(igl::select_lambda(cov, {}, 100, igl::SolverConfig{}), igl::InvalidConfig);
  CHECK_THROWS_AS(igl::select_lambda(cov, {0.1, 0.2}, 100, igl::SolverConfig{}), igl::InvalidConfig);
  CHECK_THROWS_AS(igl::select_lambda(cov, {0.2, 0.2}, 100, igl::SolverConfig{}), igl::InvalidConfig);
}

TEST_CASE("selection is the argmin of the recorded BIC") {
  const auto cov = fixtures::wishart_cov(8, 4, 150);
  const auto g = igl::lambda_grid(cov.pooled, 20);
  const auto path = igl::select_lambda(cov, g.values, 150, igl::SolverConfig{});
  int best = 0;
  for (int k = 1; k < 20; ++k)
    if (path.bic[k] < path.bic[best]) best = k;
  CHECK(path.selected_index == best);
  for (int k = 0; k < 20; ++k) {
    CHECK(path.entries[k].ok);
    CHECK(path.entries[k].k == igl::degrees_of_freedom(path.entries[k].fit.theta_hat));
  }
}

TEST_CASE("warm and cold paths agree") {
  const auto cov = fixtures::wishart_cov(10, 6, 120);
  const auto g = igl::lambda_grid(cov.pooled, 15);
  igl::PathOptions cold;
  cold.warm_start = false;
  const auto a = igl::select_lambda(cov, g.values, 120, igl::SolverConfig{});
  const auto b = igl::select_lambda(cov, g.values, 120, igl::SolverConfig{}, cold);
  for (int k = 0; k < 15; ++k) {
    CHECK(std::abs(a.entries[k].fit.objective - b.entries[k].fit.objective) <= 10 * 1e-6 * 10);
  }
  CHECK(a.selected_index == b.selected_index);
}

TEST_CASE("BIC recovers the band support") {
  igl::sim::StructureSpec spec;
  spec.kind = igl::sim::Structure::band;
  spec.p = 50;
  const Matrix theta0 = igl::sim::make_structure(spec, 1);
  const auto sig = igl::sim::make_sigma(theta0, 2);
  const Matrix z = igl::sim::sample_latent(200, sig.sigma, 3);
  igl::sim::DGPConfig dgp;
  dgp.kind = igl::sim::DgpKind::dgp3;
  dgp.seed = 4;
  const auto cov = igl::bound_covariances(igl::sim::make_intervals(z, dgp));
  const auto g = igl::lambda_grid(cov.pooled);
  const auto path = igl::select_lambda(cov, g.values, 200, igl::SolverConfig{});
  const auto err = igl::sim::error_metrics(path.selected().theta_hat, sig.theta_true);
  CHECK(err.support_tpr >= 0.9);
}
