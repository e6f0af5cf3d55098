// core/src/jda_trainer.cc

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

#include "jdapot/jda_trainer.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>

#include "jdapot/errors.h"

namespace jdapot {

namespace {

enum Stream : std::uint64_t { kSourceBatches = 11, kTargetBatches = 12 };

void CheckNonNegative(double v, const char *name) {
  if (!(v >= 0.0) || !std::isfinite(v))
    throw InvalidArgument(std::string(name) + " must be finite and >= 0");
}

// Stabilised Euclidean distances between the rows of a and b.
Matrix Distances(const Matrix &a, const Matrix &b) {
  return PairwiseFeatureCost(a, b, CostMetric::kEuclidean);
}

}  // namespace

AdaptMode ParseAdaptMode(const std::string &name) {
  std::string s;
  for (char c : name) s.push_back(c == '_' ? '-' : static_cast<char>(std::tolower(c)));
  if (s == "source-only") return AdaptMode::kSourceOnly;
  if (s == "jda-ot") return AdaptMode::kJdaOt;
  if (s == "jda-pot") return AdaptMode::kJdaPot;
  throw InvalidArgument("unknown adaptation mode \"" + name +
                        "\" (expected source-only, jda-ot or jda-pot)");
}

std::string AdaptModeName(AdaptMode mode) {
  switch (mode) {
    case AdaptMode::kSourceOnly: return "source-only";
    case AdaptMode::kJdaOt: return "jda-ot";
    case AdaptMode::kJdaPot: return "jda-pot";
  }
  return "?";
}

void JdaHyperParams::Check() const {
  CheckNonNegative(alpha, "alpha");
  CheckNonNegative(beta, "beta");
  CheckNonNegative(lambda, "lambda");
  pot.Check();
  CheckNonNegative(epsilon, "epsilon");
  if (epsilon == 0.0 && !(epsilon_relative > 0.0))
    throw InvalidArgument("epsilon_relative must be > 0 when epsilon is 0");
  if (sinkhorn_max_iter < 1) throw InvalidArgument("sinkhorn_max_iter must be >= 1");
  if (!(sinkhorn_tol > 0.0)) throw InvalidArgument("sinkhorn_tol must be > 0");
  if (batch_source < 1 || batch_target < 1)
    throw InvalidArgument("batch sizes must be >= 1");
  if (iterations < 0) throw InvalidArgument("iterations must be >= 0");
  if (pretrain_iterations < 0) throw InvalidArgument("pretrain_iterations must be >= 0");
  if (inner_steps < 1) throw InvalidArgument("inner_steps must be >= 1");
  if (!(learning_rate > 0.0)) throw InvalidArgument("learning_rate must be > 0");
}

void TrainHistory::WriteCsv(const std::string &path) const {
  std::FILE *fp = std::fopen(path.c_str(), "w");
  if (fp == nullptr) throw IoError("cannot open " + path + " for writing");
  std::fprintf(fp, "iteration,ce,adaptation,total,converged\n");
  for (const auto &r : records)
    std::fprintf(fp, "%d,%.17g,%.17g,%.17g,%d\n", r.iteration, r.ce, r.adaptation,
                 r.total, r.converged ? 1 : 0);
  bool bad = std::ferror(fp) != 0;
  if (std::fclose(fp) != 0 || bad) throw IoError("error writing " + path);
}

Matrix JointCost(const Matrix &zs, const Matrix &ys, const Matrix &zt,
                 const Matrix &yt_hat, double alpha, double beta) {
  if (zs.rows() != ys.rows() || zt.rows() != yt_hat.rows())
    throw DimensionError("joint cost: feature and label row counts differ");
  if (zs.cols() != zt.cols() || ys.cols() != yt_hat.cols())
    throw DimensionError("joint cost: source and target widths differ");
  return alpha * Distances(zs, zt) + beta * Distances(ys, yt_hat);
}

AdaptationLossResult AdaptationLoss(const Matrix &cost, AdaptMode mode,
                                    const PotParams &pot,
                                    const SinkhornOptions &sinkhorn,
                                    bool coupling_on_weighted_cost) {
  AdaptationLossResult result;
  if (mode == AdaptMode::kSourceOnly) return result;

  CheckCostMatrix(cost);
  const Vector mu = UniformMarginal(cost.rows()), nu = UniformMarginal(cost.cols());
  if (mode == AdaptMode::kJdaOt) {
    result.coupling = Sinkhorn(cost, mu, nu, sinkhorn);
    result.value = TransportValue(cost, *result.coupling);
    return result;
  }

  result.weight = SoftWeight(cost, pot);
  if (coupling_on_weighted_cost) {
    Matrix weighted = cost.cwiseProduct(*result.weight);
    result.coupling = Sinkhorn(weighted, mu, nu, sinkhorn);
  } else {
    result.coupling = Sinkhorn(cost, mu, nu, sinkhorn);
  }
  result.value = WeightedTransportValue(cost, *result.coupling, *result.weight);
  return result;
}

double TotalLoss(double ce, double adaptation, double lambda) {
  return ce + lambda * adaptation;
}

double EffectiveEpsilon(const Matrix &cost, const JdaHyperParams &hp) {
  if (hp.epsilon > 0.0) return hp.epsilon;
  double mean = cost.size() > 0 ? cost.mean() : 0.0;
  // A cost matrix of all zeros makes any positive value equivalent.
  return mean > 0.0 ? hp.epsilon_relative * mean : hp.epsilon_relative;
}

ObjectiveResult EvaluateObjective(const AdaptModel &model, const Matrix &xs,
                                  const Matrix &ys_onehot, const Matrix &xt,
                                  const Matrix &plan, const Matrix *weight,
                                  double alpha, double beta, double lambda,
                                  bool with_gradient) {
  if (ys_onehot.rows() != xs.rows() || ys_onehot.cols() != model.NumClasses())
    throw DimensionError("source labels do not match the source batch");
  const ForwardCache src = Forward(model, xs);

  ObjectiveResult out;
  out.ce = CrossEntropy(ys_onehot, src.probs);

  const bool adapt_term = plan.size() > 0;
  ForwardCache tgt;
  Matrix dist_feat, dist_label, mass;
  if (adapt_term) {
    tgt = Forward(model, xt);
    if (plan.rows() != xs.rows() || plan.cols() != xt.rows())
      throw DimensionError("transport plan shape does not match the batches");
    dist_feat = Distances(src.latent, tgt.latent);
    dist_label = Distances(ys_onehot, tgt.probs);
    mass = plan;
    if (weight != nullptr) {
      if (weight->rows() != plan.rows() || weight->cols() != plan.cols())
        throw DimensionError("weight shape does not match the transport plan");
      mass = mass.cwiseProduct(*weight);
    }
    Matrix cost = alpha * dist_feat + beta * dist_label;
    out.adaptation = cost.cwiseProduct(mass).sum();
  }
  out.total = TotalLoss(out.ce, out.adaptation, lambda);
  if (!with_gradient) return out;

  UpstreamGradients up_src;
  up_src.d_logits = CrossEntropyLogitGradient(ys_onehot, src.probs);
  if (!adapt_term) {
    out.grads = Backward(model, src, up_src);
    return out;
  }

  // d/dz of sum_ij G_ij * dist(z_i, z'_j) with G = lambda * plan * weight.
  const Matrix g = lambda * mass;
  const Matrix gf = alpha * g.cwiseQuotient(dist_feat);
  const Matrix gl = beta * g.cwiseQuotient(dist_label);

  up_src.d_latent = gf.rowwise().sum().asDiagonal() * src.latent - gf * tgt.latent;

  UpstreamGradients up_tgt;
  up_tgt.d_latent =
      gf.colwise().sum().transpose().asDiagonal() * tgt.latent - gf.transpose() * src.latent;
  up_tgt.d_probs =
      gl.colwise().sum().transpose().asDiagonal() * tgt.probs - gl.transpose() * ys_onehot;

  out.grads = Backward(model, src, up_src);
  out.grads += Backward(model, tgt, up_tgt);
  return out;
}

AlignmentSnapshot ComputeAlignment(const AdaptModel &model, const Matrix &xs,
                                   const std::vector<int> &source_labels,
                                   const Matrix &xt, const JdaHyperParams &hp) {
  AlignmentSnapshot snap;
  const ForwardCache src = Forward(model, xs);
  const ForwardCache tgt = Forward(model, xt);
  const Matrix ys = OneHot(source_labels, model.NumClasses());
  snap.cost = JointCost(src.latent, ys, tgt.latent, tgt.probs, hp.alpha, hp.beta);
  SinkhornOptions opts{EffectiveEpsilon(snap.cost, hp), hp.sinkhorn_max_iter,
                       hp.sinkhorn_tol};
  AdaptMode mode = hp.mode == AdaptMode::kSourceOnly ? AdaptMode::kJdaPot : hp.mode;
  snap.adaptation =
      AdaptationLoss(snap.cost, mode, hp.pot, opts, hp.pot_coupling_on_weighted_cost);
  snap.target_pseudo_labels = Predict(model, xt).labels;
  snap.source_latent = src.latent;
  snap.target_latent = tgt.latent;
  return snap;
}

AdaptResult Adapt(const EmbeddingSet &source, const EmbeddingSet &target,
                  const AdaptModel &initial, const JdaHyperParams &hp) {
  hp.Check();
  source.Check();
  target.Check();
  initial.Check();
  if (!source.AllLabelsKnown())
    throw InvalidArgument("every source sample needs a label");
  if (source.Dim() != initial.InputDim() || target.Dim() != initial.InputDim())
    throw DimensionError("data dimension does not match the model input dimension");
  if (source.n_classes != initial.NumClasses())
    throw DimensionError("source class count " + std::to_string(source.n_classes) +
                         " does not match the model's " +
                         std::to_string(initial.NumClasses()));
  if (hp.batch_source > source.NumSamples() || hp.batch_target > target.NumSamples())
    throw InvalidArgument("batch size exceeds the number of samples");

  AdaptResult result{initial, {}};
  AdaptModel &model = result.model;
  AdamState adam = AdamState::For(model, hp.learning_rate);
  Rng source_rng = MakeRng(hp.seed, kSourceBatches);
  Rng target_rng = MakeRng(hp.seed, kTargetBatches);
  const int total_iterations = hp.pretrain_iterations + hp.iterations;
  result.history.records.reserve(static_cast<std::size_t>(total_iterations));

  for (int it = 0; it < total_iterations; it++) {
    const bool adapting =
        hp.mode != AdaptMode::kSourceOnly && it >= hp.pretrain_iterations;
    const MiniBatch sb = SampleMiniBatch(source, hp.batch_source, source_rng);
    const MiniBatch tb = SampleMiniBatch(target, hp.batch_target, target_rng);
    const Matrix ys = OneHot(sb.labels, model.NumClasses());

    IterationRecord rec;
    rec.iteration = it + 1;

    // E-like step: coupling (and weights) with the parameters frozen.
    AdaptationLossResult align;
    if (adapting) {
      const ForwardCache src = Forward(model, sb.vectors);
      const ForwardCache tgt = Forward(model, tb.vectors);
      const Matrix cost =
          JointCost(src.latent, ys, tgt.latent, tgt.probs, hp.alpha, hp.beta);
      SinkhornOptions opts{EffectiveEpsilon(cost, hp), hp.sinkhorn_max_iter,
                           hp.sinkhorn_tol};
      align = AdaptationLoss(cost, hp.mode, hp.pot, opts,
                             hp.pot_coupling_on_weighted_cost);
      rec.converged = align.coupling->converged;
      rec.sinkhorn_iterations = align.coupling->iterations;
      rec.marginal_error = align.coupling->marginal_error;
      rec.coupling_mass = align.coupling->TotalMass();
      rec.adaptation = align.value;
    }

    // M-like step(s): Adam on the objective with coupling/weights frozen.
    static const Matrix kNoPlan;
    const Matrix &plan = adapting ? align.coupling->plan : kNoPlan;
    const Matrix *weight = align.weight ? &*align.weight : nullptr;
    for (int step = 0; step < hp.inner_steps; step++) {
      ObjectiveResult obj =
          EvaluateObjective(model, sb.vectors, ys, tb.vectors, plan, weight,
                            hp.alpha, hp.beta, hp.lambda, true);
      if (step == 0) rec.ce = obj.ce;
      if (!std::isfinite(obj.total))
        throw NumericError("non-finite loss at iteration " + std::to_string(it + 1));
      AdamStep(&model, obj.grads, &adam);
    }
    rec.total = TotalLoss(rec.ce, rec.adaptation, hp.lambda);
    result.history.records.push_back(rec);
  }
  return result;
}

Prediction Predict(const AdaptModel &model, const Matrix &inputs) {
  Prediction pred;
  pred.probs = Forward(model, inputs).probs;
  pred.labels.resize(static_cast<std::size_t>(pred.probs.rows()));
  for (Eigen::Index r = 0; r < pred.probs.rows(); r++) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < pred.probs.cols(); c++)
      if (pred.probs(r, c) > pred.probs(r, best)) best = c;
    pred.labels[r] = static_cast<int>(best);
  }
  return pred;
}

Prediction Predict(const AdaptModel &model, const EmbeddingSet &set) {
  if (set.Dim() != model.InputDim())
    throw DimensionError("data dimension " + std::to_string(set.Dim()) +
                         " does not match model input dimension " +
                         std::to_string(model.InputDim()));
  return Predict(model, set.vectors);
}

}  // namespace jdapot
