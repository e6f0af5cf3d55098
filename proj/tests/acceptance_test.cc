// tests/acceptance_test.cc

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

// Acceptance gate: one PASS / FAIL line per criterion, exit status 1 if any
// criterion fails.  The synthetic-benchmark regression constants below were
// measured once on the pinned setup and must only change together with a
// deliberate change of the training procedure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.h"
#include "jdapot/adapt_model.h"
#include "jdapot/jda_trainer.h"
#include "jdapot/metrics.h"
#include "jdapot/ot_solver.h"
#include "jdapot/pot_weighting.h"
#include "jdapot/synthetic.h"
#include "oracles.h"
#include "test_util.h"

namespace jdapot {
namespace {

using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string Fmt(const char *format, double a, double b = 0, double c = 0,
                double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c, d);
  return buf;
}

// ---------------------------------------------------------------------------
// Pinned synthetic benchmark: 10 source classes, 6-class target subset.

constexpr int kLatentDim = 16;
constexpr std::uint64_t kInitSeed = 7;
constexpr std::uint64_t kTrainSeed = 3;
constexpr int kPretrainIterations = 1000;
constexpr int kAdaptIterations = 1000;

// Regression constants (target-domain accuracy and EER), tolerance 1 point.
constexpr double kPinnedTolerance = 0.01;
constexpr double kPinnedAccuracy[3] = {0.7108, 0.7592, 0.8167};
constexpr double kPinnedEer[3] = {0.1242, 0.0798, 0.0695};
constexpr AdaptMode kModes[3] = {AdaptMode::kSourceOnly, AdaptMode::kJdaOt,
                                 AdaptMode::kJdaPot};

JdaHyperParams BenchmarkParams(AdaptMode mode) {
  JdaHyperParams hp;
  hp.mode = mode;
  hp.seed = kTrainSeed;
  hp.pretrain_iterations = kPretrainIterations;
  hp.iterations = kAdaptIterations;
  return hp;
}

struct BenchmarkRun {
  AdaptResult result;
  double accuracy = 0.0;
  double eer = 0.0;
  double cavg = 0.0;
};

struct Benchmark {
  EmbeddingSet source, target;
  BenchmarkRun runs[3];
  double seconds = 0.0;
};

const Benchmark &PinnedBenchmark() {
  static const Benchmark bench = [] {
    Benchmark b;
    const Clock::time_point t0 = Clock::now();
    SynthConfig config;
    std::tie(b.source, b.target) = GenerateSynthetic(config);
    const AdaptModel init =
        InitModel(config.dim, kLatentDim, config.n_source_classes, kInitSeed);
    for (int m = 0; m < 3; m++) {
      BenchmarkRun &run = b.runs[m];
      run.result = Adapt(b.source, b.target, init, BenchmarkParams(kModes[m]));
      Prediction p = Predict(run.result.model, b.target);
      TrialScores trials = RestrictToPresentLanguages({p.probs, b.target.labels});
      run.accuracy = Accuracy(p.labels, b.target.labels);
      run.eer = Eer(trials);
      run.cavg = Cavg(trials, 0.5, 0.5);
    }
    b.seconds = SecondsSince(t0);
    return b;
  }();
  return bench;
}

// ---------------------------------------------------------------------------

Outcome SolverOracleEquivalence() {
  const Clock::time_point t0 = Clock::now();
  Rng rng(20221);
  std::uniform_int_distribution<int> size(2, 6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Outcome o;
  double worst = 0.0;
  for (int inst = 0; inst < 100; inst++) {
    const int n = size(rng);
    Matrix cost(n, n);
    for (Eigen::Index i = 0; i < cost.size(); i++) cost(i) = u(rng);
    // At this epsilon near-permutation plans converge very slowly; the value
    // settles long before the marginals reach 1e-9, so the cap bounds runtime.
    SinkhornOptions opts{0.005 * cost.maxCoeff(), 20000, 1e-9};
    Coupling c = Sinkhorn(cost, UniformMarginal(n), UniformMarginal(n), opts);
    const double exact = ExactOtOracle(cost).value;
    const double rel = std::abs(TransportValue(cost, c) - exact) / exact;
    worst = std::max(worst, rel);
    if (!(rel < 0.01)) o.pass = false;
  }
  const double secs = SecondsSince(t0);
  if (!(secs < 5.0)) o.pass = false;
  o.detail = Fmt("100 instances, worst relative gap %.2e, %.2f s", worst, secs);
  return o;
}

Outcome GradientSuite() {
  const Clock::time_point t0 = Clock::now();
  Rng rng(20222);
  std::uniform_int_distribution<int> dim(2, 4), batch(2, 6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  int models = 0;
  for (int trial = 0; trial < 40; trial++, models++) {
    const bool pot = trial % 2 == 1;
    const int d = dim(rng), k = dim(rng), c = dim(rng), n = batch(rng), m = batch(rng);
    AdaptModel model = InitModel(d, k, c, 500 + trial);
    model.proj_bias = testing::RandomMatrix(k, 1, rng, -0.3, 0.3);
    model.cls_bias = testing::RandomMatrix(c, 1, rng, -0.3, 0.3);
    model.cls_weight *= 2.0;
    Matrix xs = testing::RandomMatrix(n, d, rng, -2, 2);
    Matrix xt = testing::RandomMatrix(m, d, rng, -2, 2);
    std::vector<int> labels(n);
    for (int i = 0; i < n; i++) labels[i] = static_cast<int>(u(rng) * c);
    Matrix ys = OneHot(labels, c);

    // Frozen coupling and weights from the solver, as in training.
    JdaHyperParams hp;
    hp.mode = pot ? AdaptMode::kJdaPot : AdaptMode::kJdaOt;
    hp.beta = 0.3;
    hp.pot = {0.8, 5.0};
    const ForwardCache fs = Forward(model, xs), ft = Forward(model, xt);
    Matrix cost = JointCost(fs.latent, ys, ft.latent, ft.probs, hp.alpha, hp.beta);
    AdaptationLossResult align = AdaptationLoss(
        cost, hp.mode, hp.pot, {EffectiveEpsilon(cost, hp), 1000, 1e-9});
    const Matrix &plan = align.coupling->plan;
    const Matrix *weight = align.weight ? &*align.weight : nullptr;
    const double lambda = 0.5 + u(rng);

    ObjectiveResult res = EvaluateObjective(model, xs, ys, xt, plan, weight, hp.alpha,
                                            hp.beta, lambda, true);
    auto loss = [&]() {
      return EvaluateObjective(model, xs, ys, xt, plan, weight, hp.alpha, hp.beta,
                               lambda, false).total;
    };
    auto probe = [&](auto &param, const auto &analytic) {
      for (Eigen::Index i = 0; i < param.size(); i++) {
        const double saved = param(i), h = 1e-5;
        param(i) = saved + h;
        const double up = loss();
        param(i) = saved - h;
        const double down = loss();
        param(i) = saved;
        const double num = (up - down) / (2 * h);
        const double denom = std::max({std::abs(num), std::abs(analytic(i)), 1e-6});
        worst = std::max(worst, std::abs(num - analytic(i)) / denom);
      }
    };
    probe(model.proj_weight, res.grads.proj_weight);
    probe(model.proj_bias, res.grads.proj_bias);
    probe(model.cls_weight, res.grads.cls_weight);
    probe(model.cls_bias, res.grads.cls_bias);
  }
  const double secs = SecondsSince(t0);
  Outcome o;
  o.pass = worst < 1e-4 && secs < 10.0 && models >= 20;
  o.detail = Fmt("%.0f models (OT and POT), worst relative error %.2e, %.2f s", models,
                 worst, secs);
  return o;
}

Outcome CouplingInvariants() {
  const Benchmark &b = PinnedBenchmark();
  SynthConfig config;
  const AdaptModel init =
      InitModel(config.dim, kLatentDim, config.n_source_classes, kInitSeed);
  Outcome o;
  double worst_marginal = 0.0, worst_mass = 0.0;
  int couplings = 0;
  for (AdaptMode mode : {AdaptMode::kJdaOt, AdaptMode::kJdaPot}) {
    JdaHyperParams hp = BenchmarkParams(mode);
    hp.pretrain_iterations = 0;
    hp.iterations = 200;
    AdaptResult r = Adapt(b.source, b.target, init, hp);
    for (const IterationRecord &rec : r.history.records) {
      couplings++;
      worst_marginal = std::max(worst_marginal, rec.marginal_error);
      worst_mass = std::max(worst_mass, std::abs(rec.coupling_mass - 1.0));
      if (!(rec.marginal_error < 1e-6) || !(std::abs(rec.coupling_mass - 1.0) <= 1e-9))
        o.pass = false;
    }
  }
  o.detail = Fmt("%.0f couplings, max marginal violation %.2e, max |mass - 1| %.2e",
                 couplings, worst_marginal, worst_mass);
  return o;
}

Outcome SoftWeightContract() {
  Outcome o;
  Rng rng(20224);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_sym = 0.0;
  for (int i = 0; i < 10000; i++) {
    PotParams p{0.1 + 2.0 * u(rng), 20.0 * u(rng)};
    const double delta = u(rng) * p.cost_threshold;
    Matrix c(1, 2);
    c << p.cost_threshold - delta, p.cost_threshold + delta;
    Matrix w = SoftWeight(c, p);
    worst_sym = std::max(worst_sym, std::abs(w(0) + w(1) - 1.0));
  }

  double worst_hard = 0.0;
  Matrix cost = testing::RandomMatrix(200, 200, rng, 0.0, 2.0);
  PotParams sharp{1.0, 1e4};
  Matrix soft = SoftWeight(cost, sharp), hard = HardWeight(cost, sharp);
  for (Eigen::Index i = 0; i < cost.size(); i++)
    if (std::abs(cost(i) - sharp.cost_threshold) > 2e-3)
      worst_hard = std::max(worst_hard, std::abs(soft(i) - hard(i)));

  // Same seed, same batches and lambda = 0 so both runs share every coupling.
  SynthConfig config;
  config.samples_per_class_source = 40;
  config.samples_per_class_target = 40;
  auto [source, target] = GenerateSynthetic(config);
  AdaptModel init = InitModel(config.dim, kLatentDim, config.n_source_classes, 1);
  JdaHyperParams ot;
  ot.mode = AdaptMode::kJdaOt;
  ot.lambda = 0.0;
  ot.iterations = 100;
  ot.learning_rate = 5e-3;
  JdaHyperParams half = ot;
  half.mode = AdaptMode::kJdaPot;
  half.pot.scale = 0.0;
  AdaptResult a = Adapt(source, target, init, ot), h = Adapt(source, target, init, half);
  double worst_half = 0.0;
  for (std::size_t i = 0; i < a.history.records.size(); i++)
    worst_half = std::max(worst_half, std::abs(h.history.records[i].adaptation -
                                               0.5 * a.history.records[i].adaptation));

  o.pass = worst_sym <= 1e-12 && worst_hard < 1e-4 && worst_half <= 1e-12;
  o.detail = Fmt("symmetry %.1e, hard-limit %.1e, halving over 100 iterations %.1e",
                 worst_sym, worst_hard, worst_half);
  return o;
}

Outcome BenchmarkOrdering() {
  const Benchmark &b = PinnedBenchmark();
  const BenchmarkRun &so = b.runs[0], &ot = b.runs[1], &pot = b.runs[2];
  Outcome o;
  o.pass = pot.accuracy >= ot.accuracy && ot.accuracy >= so.accuracy &&
           pot.eer <= ot.eer && ot.eer <= so.eer && b.seconds < 120.0;
  for (int m = 0; m < 3; m++) {
    if (!(std::abs(b.runs[m].accuracy - kPinnedAccuracy[m]) <= kPinnedTolerance))
      o.pass = false;
    if (!(std::abs(b.runs[m].eer - kPinnedEer[m]) <= kPinnedTolerance)) o.pass = false;
  }
  std::ostringstream os;
  for (int m = 0; m < 3; m++)
    os << AdaptModeName(kModes[m])
       << Fmt(" acc=%.4f eer=%.4f cavg=%.4f; ", b.runs[m].accuracy, b.runs[m].eer,
              b.runs[m].cavg);
  os << Fmt("%.1f s", b.seconds);
  o.detail = os.str();
  return o;
}

Outcome BlockStructure() {
  const Benchmark &b = PinnedBenchmark();
  const AdaptModel &model = b.runs[2].result.model;
  JdaHyperParams hp = BenchmarkParams(AdaptMode::kJdaPot);
  const ForwardCache fs = Forward(model, b.source.vectors);
  const ForwardCache ft = Forward(model, b.target.vectors);
  const Matrix ys = OneHot(b.source.labels, model.NumClasses());
  const Matrix w = SoftWeight(
      JointCost(fs.latent, ys, ft.latent, ft.probs, hp.alpha, hp.beta), hp.pot);

  const std::set<int> shared(b.target.labels.begin(), b.target.labels.end());
  double match_sum = 0.0, outlier_sum = 0.0;
  long match_n = 0, outlier_n = 0;
  for (int i = 0; i < b.source.NumSamples(); i++) {
    const int ls = b.source.labels[i];
    const bool outlier = shared.count(ls) == 0;
    for (int j = 0; j < b.target.NumSamples(); j++) {
      if (outlier) {
        outlier_sum += w(i, j);
        outlier_n++;
      } else if (b.target.labels[j] == ls) {
        match_sum += w(i, j);
        match_n++;
      }
    }
  }
  const double match = match_sum / match_n, outliers = outlier_sum / outlier_n;
  Outcome o;
  o.pass = match > outliers;
  o.detail = Fmt("mean weight, matching shared classes %.4f vs absent source classes %.4f",
                 match, outliers);
  return o;
}

Outcome MetricsOracle() {
  Rng rng(20227);
  Outcome o;
  int points = 0;
  double worst_interp = 0.0;
  for (int set = 0; set < 50; set++) {
    TrialScores t = testing::RandomTrialScores(rng, 200, 6);
    std::vector<double> tar, non;
    testing::PooledPairs(t, &tar, &non);
    testing::EerOracleResult oracle = testing::BruteForceEer(tar, non);
    const double eer = Eer(t);
    if (oracle.at_operating_point) {
      if (eer != oracle.eer) o.pass = false;
    } else {
      worst_interp = std::max(worst_interp, std::abs(eer - oracle.eer));
      if (!(std::abs(eer - oracle.eer) <= 1e-12)) o.pass = false;
    }
    std::set<double> thresholds(t.scores.data(), t.scores.data() + t.scores.size());
    for (double th : thresholds) {
      points++;
      if (Cavg(t, 0.5, th) != testing::BruteForceCavg(t, 0.5, th)) o.pass = false;
    }
  }
  o.detail = Fmt("50 score sets, %.0f cavg operating points exact, worst eer "
                 "interpolation gap %.1e",
                 points, worst_interp);
  return o;
}

Outcome Determinism() {
  testing::TempDir dir;
  std::ostringstream out, err;
  int code = cli::Run({"synth", "--out-dir", dir.File("data")}, out, err);
  auto adapt = [&](const std::string &tag) {
    return cli::Run({"adapt", "--source", dir.File("data/source.csv"), "--target",
                     dir.File("data/target.csv"), "--checkpoint", dir.File(tag + ".ckpt"),
                     "--history", dir.File(tag + ".csv"), "--mode", "jda-pot",
                     "--pretrain-iterations", "50", "--iterations", "100", "--seed", "3"},
                    out, err);
  };
  code |= adapt("first");
  code |= adapt("second");
  Outcome o;
  const std::string c1 = testing::ReadFile(dir.File("first.ckpt"));
  const std::string h1 = testing::ReadFile(dir.File("first.csv"));
  o.pass = code == 0 && !c1.empty() && !h1.empty() &&
           c1 == testing::ReadFile(dir.File("second.ckpt")) &&
           h1 == testing::ReadFile(dir.File("second.csv"));
  o.detail = code == 0 ? Fmt("checkpoints %.0f bytes, histories %.0f bytes", c1.size(),
                             h1.size())
                       : "adapt failed: " + err.str();
  return o;
}

}  // namespace
}  // namespace jdapot

int main() {
  using jdapot::Outcome;
  struct Criterion {
    const char *name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"solver-oracle equivalence", jdapot::SolverOracleEquivalence},
      {"objective gradient suite", jdapot::GradientSuite},
      {"coupling invariants", jdapot::CouplingInvariants},
      {"soft-weight contract", jdapot::SoftWeightContract},
      {"benchmark mode ordering", jdapot::BenchmarkOrdering},
      {"coupling-weight block structure", jdapot::BlockStructure},
      {"metrics oracle", jdapot::MetricsOracle},
      {"adapt determinism", jdapot::Determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); i++) {
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s [%zu] %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
