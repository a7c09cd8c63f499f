// Serial against OpenMP for the kernels that have both variants.
#include <benchmark/benchmark.h>

#include <random>

#include "gapcert/certifier.hpp"
#include "gapcert/edlab.hpp"
#include "gapcert/families.hpp"
#include "gapcert/graph.hpp"
#include "gapcert/logsum.hpp"

using namespace gapcert;

namespace {

Exec exec_of(const benchmark::State& s) { return s.range(0) ? Exec::Parallel : Exec::Serial; }

void BM_PauliSumApply(benchmark::State& state) {
  const auto t33 = toric_code(3, 3);
  PauliSum h = build_H0(t33.code);
  h += build_perturbation(t33.code.n_qubits, {0.02, 0.0});
  RMat in = RMat::Random(static_cast<Eigen::Index>(h.dim()), 8), out;
  for (auto _ : state) {
    h.apply(in, out, exec_of(state));
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_GrowthProfile(benchmark::State& state) {
  const Graph g = torus_grid(2, 96);
  for (auto _ : state) benchmark::DoNotOptimize(growth_profile(g, exec_of(state)).gamma.data());
}

void BM_LogSumExp(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd(0.0, 50.0);
  std::vector<double> xs(1 << 22);
  for (auto& x : xs) x = nd(rng);
  for (auto _ : state) benchmark::DoNotOptimize(log_sum_exp(xs, exec_of(state)));
}

void BM_CertifyStacked(benchmark::State& state) {
  const auto family = model_stacked(4, {1e9, 1e10, 1e11, 1e12});
  CertifierOptions opt;
  opt.exec = exec_of(state);
  opt.series.exec = opt.exec;
  for (auto _ : state) benchmark::DoNotOptimize(certify(family, {0.01, 5.0}, {}, opt).points.size());
}

}  // namespace

// Argument 0 is serial, 1 is OpenMP.
BENCHMARK(BM_PauliSumApply)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GrowthProfile)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LogSumExp)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CertifyStacked)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
