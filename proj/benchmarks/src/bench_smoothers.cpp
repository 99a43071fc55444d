#include <benchmark/benchmark.h>

#include <Eigen/Core>
#include <random>

#include "stlccp/smoothers.hpp"

namespace {

Eigen::VectorXd random_vector(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> entry(-10.0, 10.0);
  Eigen::VectorXd a(n);
  for (int i = 0; i < n; ++i) a[i] = entry(rng);
  return a;
}

void BM_Mellowmin(benchmark::State& state) {
  const Eigen::VectorXd a = random_vector(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(stlccp::mellowmin(a, 1000.0));
  }
}
BENCHMARK(BM_Mellowmin)->Arg(4)->Arg(32)->Arg(256);

void BM_MellowminGrad(benchmark::State& state) {
  const Eigen::VectorXd a = random_vector(static_cast<int>(state.range(0)), 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(stlccp::mellowmin_grad(a, 1000.0));
  }
}
BENCHMARK(BM_MellowminGrad)->Arg(4)->Arg(32)->Arg(256);

void BM_LseMin(benchmark::State& state) {
  const Eigen::VectorXd a = random_vector(static_cast<int>(state.range(0)), 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(stlccp::lse_min(a, 10.0));
  }
}
BENCHMARK(BM_LseMin)->Arg(4)->Arg(32)->Arg(256);

}  // namespace
