// core/include/jdapot/adapt_model.h

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

#ifndef JDAPOT_ADAPT_MODEL_H_
#define JDAPOT_ADAPT_MODEL_H_

#include <cstdint>
#include <string>

#include "jdapot/types.h"

namespace jdapot {

/// Guard inside the length normalisation: z = a / sqrt(|a|^2 + kNormStab).
inline constexpr double kNormStab = 1e-12;
/// Probabilities are clipped from below at this value inside the log.
inline constexpr double kProbFloor = 1e-12;

/// y(x) = softmax(W_cls * normalize(W_proj * x + b_proj) + b_cls).
///
/// The projection head (proj_*) maps a d-dimensional embedding to a
/// k-dimensional latent vector on (or inside) the unit sphere, the classifier
/// head (cls_*) maps the latent vector to C class posteriors.
struct AdaptModel {
  Matrix proj_weight;  // k x d
  Vector proj_bias;    // k
  Matrix cls_weight;   // C x k
  Vector cls_bias;     // C

  int InputDim() const { return static_cast<int>(proj_weight.cols()); }
  int LatentDim() const { return static_cast<int>(proj_weight.rows()); }
  int NumClasses() const { return static_cast<int>(cls_weight.rows()); }

  /// Throws DimensionError / InvalidArgument if shapes are inconsistent,
  /// k < 2, C < 2 or any parameter is non-finite.
  void Check() const;
};

/// Same layout as AdaptModel; used for gradients and Adam moments.
struct ModelGradients {
  Matrix proj_weight;
  Vector proj_bias;
  Matrix cls_weight;
  Vector cls_bias;

  static ModelGradients ZerosLike(const AdaptModel &model);
  ModelGradients &operator+=(const ModelGradients &other);
  ModelGradients &operator*=(double factor);
  double MaxAbs() const;
};

/// Xavier-normal weights (std sqrt(2 / (fan_in + fan_out))), zero biases.
AdaptModel InitModel(int input_dim, int latent_dim, int n_classes,
                     std::uint64_t seed);

/// Intermediate values of one forward pass, kept for Backward().
struct ForwardCache {
  Matrix input;     // batch x d
  Matrix pre_norm;  // batch x k, W_proj x + b_proj
  Vector norm;      // batch, sqrt(|pre_norm|^2 + kNormStab)
  Matrix latent;    // batch x k
  Matrix logits;    // batch x C
  Matrix probs;     // batch x C

  bool Valid() const { return input.rows() > 0 && probs.rows() == input.rows(); }
};

ForwardCache Forward(const AdaptModel &model, const Matrix &inputs);

/// Latent features only (the h transform).
Matrix Project(const AdaptModel &model, const Matrix &inputs);
/// Class posteriors from latent features (the g transform).
Matrix Classify(const AdaptModel &model, const Matrix &latent);
/// Row-wise softmax with max subtraction.
Matrix Softmax(const Matrix &logits);

/// Mean over rows of -sum_j y_ij log(max(p_ij, kProbFloor)).
double CrossEntropy(const Matrix &targets, const Matrix &probs);
/// d CrossEntropy / d logits = (probs - targets) / batch.
Matrix CrossEntropyLogitGradient(const Matrix &targets, const Matrix &probs);

/// Gradient of some scalar loss with respect to the outputs of a forward
/// pass.  Any member may be left empty (0 x 0), meaning zero.
struct UpstreamGradients {
  Matrix d_latent;  // dL/dz
  Matrix d_probs;   // dL/dy, pushed back through the softmax
  Matrix d_logits;  // dL/dlogits, added after the softmax Jacobian
};

/// Back-propagates `upstream` through the classifier, the length
/// normalisation and the projection.  Throws InvalidArgument if `cache` does
/// not hold a forward pass and DimensionError if shapes disagree.
ModelGradients Backward(const AdaptModel &model, const ForwardCache &cache,
                        const UpstreamGradients &upstream);

struct AdamState {
  ModelGradients first_moment;
  ModelGradients second_moment;
  std::int64_t step = 0;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState For(const AdaptModel &model, double learning_rate = 1e-3);
};

/// Bias-corrected Adam update, in place.
void AdamStep(AdaptModel *model, const ModelGradients &grads, AdamState *state);

/// Text checkpoint: a versioned header with (d, k, C) then the four tensors in
/// row-major order, 17 significant digits.  Identical models give identical
/// bytes.
void SaveCheckpoint(const AdaptModel &model, const std::string &path);
/// Throws IoError / ParseError; validates every tensor against the header.
AdaptModel LoadCheckpoint(const std::string &path);

}  // namespace jdapot

#endif  // JDAPOT_ADAPT_MODEL_H_
