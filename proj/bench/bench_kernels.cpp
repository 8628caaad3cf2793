// Serial reference vs OpenMP kernels. Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <random>

#include "igl/kernels.hpp"
#include "igl/simulation.hpp"

namespace {

Eigen::MatrixXd panel(Eigen::Index n, Eigen::Index p) {
  std::mt19937_64 eng(1);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd x(n, p);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = nd(eng);
  return x;
}

void BM_GramSerial(benchmark::State& st) {
  const auto x = panel(500, st.range(0));
  const auto mu = igl::kernels::column_means(x);
  for (auto _ : st) benchmark::DoNotOptimize(igl::kernels::centered_gram_serial(x, mu));
}

void BM_GramParallel(benchmark::State& st) {
  const auto x = panel(500, st.range(0));
  const auto mu = igl::kernels::column_means(x);
  for (auto _ : st) benchmark::DoNotOptimize(igl::kernels::centered_gram_parallel(x, mu));
}

void BM_TraceSerial(benchmark::State& st) {
  const auto a = panel(st.range(0), st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(igl::kernels::trace_product_serial(a, a));
}

void BM_TraceParallel(benchmark::State& st) {
  const auto a = panel(st.range(0), st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(igl::kernels::trace_product_parallel(a, a));
}

void BM_Replications(benchmark::State& st) {
  igl::sim::ExperimentConfig cfg;
  cfg.structures = {igl::sim::Structure::band};
  cfg.ns = {100};
  cfg.ps = {20};
  cfg.reps = 8;
  cfg.grid_count = 20;
  const int jobs = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(igl::sim::run_replications(cfg, jobs));
}

}  // namespace

BENCHMARK(BM_GramSerial)->Arg(64)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GramParallel)->Arg(64)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TraceSerial)->Arg(256)->Arg(1024)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_TraceParallel)->Arg(256)->Arg(1024)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Replications)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
