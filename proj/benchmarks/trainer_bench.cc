// benchmarks/trainer_bench.cc

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

#include "jdapot/jda_trainer.h"
#include "jdapot/synthetic.h"

namespace jdapot {
namespace {

// Cost of 50 training iterations on the default synthetic benchmark, per mode.
void BM_AdaptIterations(benchmark::State &state) {
  static const auto data = GenerateSynthetic(SynthConfig{});
  const AdaptModel init = InitModel(64, 16, 10, 7);
  JdaHyperParams hp;
  hp.mode = static_cast<AdaptMode>(state.range(0));
  hp.iterations = 50;
  for (auto _ : state) {
    AdaptResult r = Adapt(data.first, data.second, init, hp);
    benchmark::DoNotOptimize(r.model.cls_bias.data());
  }
  state.SetLabel(AdaptModeName(hp.mode));
  state.SetItemsProcessed(state.iterations() * hp.iterations);
}
BENCHMARK(BM_AdaptIterations)
    ->Arg(static_cast<int>(AdaptMode::kSourceOnly))
    ->Arg(static_cast<int>(AdaptMode::kJdaOt))
    ->Arg(static_cast<int>(AdaptMode::kJdaPot))
    ->Unit(benchmark::kMillisecond);

void BM_ForwardBackward(benchmark::State &state) {
  const int batch = static_cast<int>(state.range(0));
  AdaptModel model = InitModel(64, 16, 10, 1);
  Matrix x = Matrix::Random(batch, 64);
  UpstreamGradients up;
  up.d_latent = Matrix::Random(batch, 16);
  up.d_probs = Matrix::Random(batch, 10);
  for (auto _ : state) {
    ForwardCache cache = Forward(model, x);
    ModelGradients g = Backward(model, cache, up);
    benchmark::DoNotOptimize(g.proj_weight.data());
  }
}
BENCHMARK(BM_ForwardBackward)->Arg(64)->Arg(256);

}  // namespace
}  // namespace jdapot
