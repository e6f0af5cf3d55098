// core/include/jdapot/jda_trainer.h

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

#ifndef JDAPOT_JDA_TRAINER_H_
#define JDAPOT_JDA_TRAINER_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jdapot/adapt_model.h"
#include "jdapot/embedding_set.h"
#include "jdapot/ot_solver.h"
#include "jdapot/pot_weighting.h"

namespace jdapot {

enum class AdaptMode { kSourceOnly, kJdaOt, kJdaPot };

/// Parses "source-only", "jda-ot", "jda-pot" (case-insensitive, '_' == '-').
AdaptMode ParseAdaptMode(const std::string &name);
std::string AdaptModeName(AdaptMode mode);

struct JdaHyperParams {
  double alpha = 1.0;    // weight of the latent-feature distance in the cost
  double beta = 0.001;   // weight of the label distance in the cost
  double lambda = 1.0;   // weight of the adaptation loss in the objective
  PotParams pot;
  AdaptMode mode = AdaptMode::kJdaPot;

  /// Absolute Sinkhorn regularisation if > 0; otherwise
  /// epsilon_relative * mean(cost) is used for every mini-batch.
  double epsilon = 0.0;
  double epsilon_relative = 0.1;
  int sinkhorn_max_iter = 1000;
  double sinkhorn_tol = 1e-6;

  int batch_source = 64;
  int batch_target = 64;
  /// Adaptation iterations.  They follow `pretrain_iterations` source-only
  /// iterations run with the same optimiser state.
  int iterations = 1000;
  int pretrain_iterations = 0;
  /// Adam steps taken per coupling solve.
  int inner_steps = 1;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;

  /// Solve the POT coupling against cost * weight instead of the raw cost.
  bool pot_coupling_on_weighted_cost = false;

  void Check() const;
};

struct IterationRecord {
  int iteration = 0;
  double ce = 0.0;
  double adaptation = 0.0;
  double total = 0.0;
  bool converged = true;
  int sinkhorn_iterations = 0;
  double marginal_error = 0.0;
  double coupling_mass = 0.0;
};

struct TrainHistory {
  std::vector<IterationRecord> records;

  /// CSV with header "iteration,ce,adaptation,total,converged".
  void WriteCsv(const std::string &path) const;
};

/// Entry (i, j) = alpha * dist(zs_i, zt_j) + beta * dist(ys_i, yt_j) with
/// dist the stabilised Euclidean distance of PairwiseFeatureCost.
Matrix JointCost(const Matrix &zs, const Matrix &ys, const Matrix &zt,
                 const Matrix &yt_hat, double alpha, double beta);

struct AdaptationLossResult {
  double value = 0.0;
  std::optional<Coupling> coupling;  // absent in source-only mode
  std::optional<Matrix> weight;      // present in POT mode only
};

/// OT: coupling on the cost with uniform marginals, value = <C, gamma>.
/// POT: same coupling (or one solved on C * W when
/// `coupling_on_weighted_cost`), W = SoftWeight(C), value = <C, gamma * W>.
/// Source-only: value 0.
AdaptationLossResult AdaptationLoss(const Matrix &cost, AdaptMode mode,
                                    const PotParams &pot,
                                    const SinkhornOptions &sinkhorn,
                                    bool coupling_on_weighted_cost = false);

double TotalLoss(double ce, double adaptation, double lambda);

/// Sinkhorn regularisation used by the trainer for a given cost matrix.
double EffectiveEpsilon(const Matrix &cost, const JdaHyperParams &hp);

/// Loss terms of the training objective for one pair of mini-batches with
/// the transport plan and weights held fixed, plus (optionally) the gradient.
struct ObjectiveResult {
  double ce = 0.0;
  double adaptation = 0.0;
  double total = 0.0;
  ModelGradients grads;
};

/// ce(source) + lambda * sum_ij C_ij(theta) plan_ij weight_ij, where the
/// cost is rebuilt from the current model and target pseudo-labels.  `weight`
/// may be null (all ones).  Gradients flow through both source and target
/// branches, including the pseudo-labels, but not through plan or weight.
ObjectiveResult EvaluateObjective(const AdaptModel &model, const Matrix &xs,
                                  const Matrix &ys_onehot, const Matrix &xt,
                                  const Matrix &plan, const Matrix *weight,
                                  double alpha, double beta, double lambda,
                                  bool with_gradient);

/// Everything the E-like step computes for one pair of mini-batches.
struct AlignmentSnapshot {
  Matrix cost;
  AdaptationLossResult adaptation;
  std::vector<int> target_pseudo_labels;
  Matrix source_latent;
  Matrix target_latent;
};

AlignmentSnapshot ComputeAlignment(const AdaptModel &model, const Matrix &xs,
                                   const std::vector<int> &source_labels,
                                   const Matrix &xt, const JdaHyperParams &hp);

/// EM-like training: per iteration, sample batches, solve the coupling with
/// the parameters frozen, then take `inner_steps` Adam steps on the objective
/// with the coupling frozen.  Target labels are never read.
struct AdaptResult {
  AdaptModel model;
  TrainHistory history;
};

AdaptResult Adapt(const EmbeddingSet &source, const EmbeddingSet &target,
                  const AdaptModel &initial, const JdaHyperParams &hp);

struct Prediction {
  Matrix probs;             // n_samples x C
  std::vector<int> labels;  // argmax, ties to the lowest class id
};

Prediction Predict(const AdaptModel &model, const EmbeddingSet &set);
Prediction Predict(const AdaptModel &model, const Matrix &inputs);

}  // namespace jdapot

#endif  // JDAPOT_JDA_TRAINER_H_
