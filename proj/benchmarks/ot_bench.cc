// benchmarks/ot_bench.cc

// Copyright 2026  The jdapot Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <random>

#include "jdapot/ot_solver.h"
#include "jdapot/pot_weighting.h"

namespace jdapot {
namespace {

Matrix RandomCost(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix a(n, 16), b(n, 16);
  for (Eigen::Index i = 0; i < a.size(); i++) a(i) = g(rng);
  for (Eigen::Index i = 0; i < b.size(); i++) b(i) = g(rng);
  return PairwiseFeatureCost(a, b);
}

// One mini-batch coupling at the trainer's default regularisation.
void BM_Sinkhorn(benchmark::State &state) {
  const int n = static_cast<int>(state.range(0));
  Matrix cost = RandomCost(n, 1);
  SinkhornOptions opts{0.1 * cost.mean(), 1000, 1e-6};
  const Vector u = UniformMarginal(n);
  int iterations = 0;
  for (auto _ : state) {
    Coupling c = Sinkhorn(cost, u, u, opts);
    iterations = c.iterations;
    benchmark::DoNotOptimize(c.plan.data());
  }
  state.counters["sinkhorn_iters"] = iterations;
}
BENCHMARK(BM_Sinkhorn)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

void BM_SoftWeight(benchmark::State &state) {
  const int n = static_cast<int>(state.range(0));
  Matrix cost = RandomCost(n, 2);
  PotParams pot;
  for (auto _ : state) {
    Matrix w = SoftWeight(cost, pot);
    benchmark::DoNotOptimize(w.data());
  }
}
BENCHMARK(BM_SoftWeight)->Arg(64)->Arg(256);

void BM_ExactOtOracle(benchmark::State &state) {
  Matrix cost = RandomCost(static_cast<int>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(ExactOtOracle(cost).value);
}
BENCHMARK(BM_ExactOtOracle)->DenseRange(4, 8, 2);

}  // namespace
}  // namespace jdapot
