// Microbenchmarks for the hot paths: kernel assembly, the coefficient map,
// the inner Newton solve, full solves of both schemes, and the brute-force
// reference.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include <rdpf/rdpf.hpp>

namespace {

using namespace rdpf;

Distribution random_source(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = unif(rng);
  v /= v.sum();
  return Distribution(v);
}

void bm_kernel(benchmark::State& state) {
  const int n = int(state.range(0));
  const Distribution p = random_source(n, 1);
  const Distribution u = random_source(n, 2);
  const DistortionMatrix d = DistortionMatrix::hamming(n);
  const FDivergenceSpec kl = make_builtin("kl");
  const LagrangePair s{1.5, 0.8};
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernel(p, u, s, d, kl));
  }
}
BENCHMARK(bm_kernel)->Arg(2)->Arg(8)->Arg(32)->Arg(128);

void bm_c_coeff(benchmark::State& state) {
  const int n = int(state.range(0));
  const Distribution p = random_source(n, 1);
  const Distribution u = random_source(n, 2);
  const DistortionMatrix d = DistortionMatrix::hamming(n);
  const FDivergenceSpec kl = make_builtin("kl");
  const LagrangePair s{1.5, 0.8};
  const KernelMatrix k = kernel(p, u, s, d, kl);
  for (auto _ : state) {
    benchmark::DoNotOptimize(c_coeff(p, u, k));
  }
}
BENCHMARK(bm_c_coeff)->Arg(2)->Arg(8)->Arg(32)->Arg(128);

void bm_newton_inner(benchmark::State& state) {
  const int n = int(state.range(0));
  const Distribution p = random_source(n, 1);
  const Distribution q = random_source(n, 3);
  const DistortionMatrix d = DistortionMatrix::hamming(n);
  const FDivergenceSpec kl = make_builtin("kl");
  const LagrangePair s{1.0, 1.0};
  const NewtonConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(newton_inner(p, q, s, d, kl, cfg));
  }
}
BENCHMARK(bm_newton_inner)->Arg(2)->Arg(8)->Arg(32);

void bm_solve_nam(benchmark::State& state) {
  const int n = int(state.range(0));
  const Distribution p = random_source(n, 1);
  const DistortionMatrix d = DistortionMatrix::hamming(n);
  const FDivergenceSpec kl = make_builtin("kl");
  const LagrangePair s{1.0, 0.5};
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_nam(p, s, d, kl, 1e-9));
  }
}
BENCHMARK(bm_solve_nam)->Arg(2)->Arg(8)->Arg(32);

void bm_solve_ram(benchmark::State& state) {
  const int n = int(state.range(0));
  const Distribution p = random_source(n, 1);
  const DistortionMatrix d = DistortionMatrix::hamming(n);
  const FDivergenceSpec kl = make_builtin("kl");
  const LagrangePair s{1.0, 0.5};
  RamConfig cfg;
  cfg.eps = 1e-9;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_ram(p, s, d, kl, cfg));
  }
}
BENCHMARK(bm_solve_ram)->Arg(2)->Arg(8)->Arg(32);

void bm_oracle_binary(benchmark::State& state) {
  const Distribution p = random_source(2, 1);
  const DistortionMatrix d = DistortionMatrix::hamming(2);
  const FDivergenceSpec kl = make_builtin("kl");
  const LagrangePair s{1.0, 0.5};
  const int grid_n = int(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(brute_force_lagrangian(p, s, d, kl, grid_n, 3));
  }
}
BENCHMARK(bm_oracle_binary)->Arg(16)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
