// Serial reference path against the OpenMP path for the data-parallel kernels.
#include <random>

#include <benchmark/benchmark.h>

#include "halfspace/regime_analysis.hpp"

using namespace halfspace;

namespace {

struct Data {
  Vec nu, d;
  Mat phi, X;
};

Data make_data(int n) {
  std::mt19937 rng(1);
  std::normal_distribution<double> nd;
  Data s;
  s.nu.resize(n);
  s.d.resize(n);
  s.phi.resize(n, 5);
  s.X.resize(n, 16);
  for (int i = 0; i < n; ++i) s.nu(i) = 1.0 + std::abs(nd(rng)), s.d(i) = nd(rng);
  for (int i = 0; i < s.phi.size(); ++i) s.phi(i) = nd(rng);
  for (int i = 0; i < s.X.size(); ++i) s.X(i) = nd(rng);
  return s;
}

void BM_assemble_bgk(benchmark::State& st) {
  const Data s = make_data(static_cast<int>(st.range(0)));
  const Execution ex = st.range(1) ? Execution::parallel : Execution::serial;
  for (auto _ : st) benchmark::DoNotOptimize(assemble_bgk(s.nu, s.phi, ex));
}

void BM_weighted_gram(benchmark::State& st) {
  const Data s = make_data(static_cast<int>(st.range(0)));
  const Execution ex = st.range(1) ? Execution::parallel : Execution::serial;
  for (auto _ : st) benchmark::DoNotOptimize(weighted_gram(s.X, s.d, s.X, ex));
}

void BM_sweep_signature(benchmark::State& st) {
  ModelSpec m;
  GridSpec g;
  g.dimension = 3;
  g.nodes = 6;
  const DiscreteSpace s = build_space(m, g);
  const LinearizedOperator op = build_bgk_operator(m, s, equilibrium(m, s), NuProfile{}, 0.0);
  const Execution ex = st.range(0) ? Execution::parallel : Execution::serial;
  for (auto _ : st) benchmark::DoNotOptimize(sweep_signature(op, s, -2.0, 2.0, 41, ex));
}

}  // namespace

BENCHMARK(BM_assemble_bgk)->ArgsProduct({{216, 1000}, {0, 1}});
BENCHMARK(BM_weighted_gram)->ArgsProduct({{216, 1000}, {0, 1}});
BENCHMARK(BM_sweep_signature)->Arg(0)->Arg(1);

BENCHMARK_MAIN();
