// core/src/adapt_model.cc

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

#include "jdapot/adapt_model.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "jdapot/errors.h"

namespace jdapot {

namespace {

constexpr const char *kCheckpointMagic = "jdapot-checkpoint";
constexpr int kCheckpointVersion = 1;

void CheckShape(const Matrix &m, Eigen::Index rows, Eigen::Index cols,
                const char *what) {
  if (m.rows() != rows || m.cols() != cols)
    throw DimensionError(std::string(what) + " is " + std::to_string(m.rows()) +
                         "x" + std::to_string(m.cols()) + ", expected " +
                         std::to_string(rows) + "x" + std::to_string(cols));
}

template <typename Fn>
void ForEachTensor(AdaptModel &model, const ModelGradients &grads,
                   ModelGradients &m1, ModelGradients &m2, Fn fn) {
  fn(model.proj_weight, grads.proj_weight, m1.proj_weight, m2.proj_weight);
  fn(model.proj_bias, grads.proj_bias, m1.proj_bias, m2.proj_bias);
  fn(model.cls_weight, grads.cls_weight, m1.cls_weight, m2.cls_weight);
  fn(model.cls_bias, grads.cls_bias, m1.cls_bias, m2.cls_bias);
}

void WriteTensor(std::FILE *fp, const char *name, const Matrix &m) {
  std::fprintf(fp, "%s %ld %ld\n", name, static_cast<long>(m.rows()),
               static_cast<long>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); r++) {
    for (Eigen::Index c = 0; c < m.cols(); c++)
      std::fprintf(fp, c == 0 ? "%.17g" : " %.17g", m(r, c));
    std::fputc('\n', fp);
  }
}

Matrix ReadTensor(std::istream &is, const std::string &path, std::size_t *line_no,
                  const char *name, Eigen::Index rows, Eigen::Index cols) {
  std::string line;
  if (!std::getline(is, line))
    throw ParseError(path, *line_no + 1, std::string("missing tensor ") + name);
  (*line_no)++;
  std::istringstream head(line);
  std::string got_name;
  long r = -1, c = -1;
  head >> got_name >> r >> c;
  if (got_name != name || r != rows || c != cols)
    throw ParseError(path, *line_no,
                     std::string("expected tensor ") + name + " " +
                         std::to_string(rows) + " " + std::to_string(cols));
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; i++) {
    if (!std::getline(is, line))
      throw ParseError(path, *line_no + 1, "truncated tensor " + std::string(name));
    (*line_no)++;
    std::istringstream row(line);
    for (Eigen::Index j = 0; j < cols; j++) {
      if (!(row >> m(i, j)) || !std::isfinite(m(i, j)))
        throw ParseError(path, *line_no, "bad value in tensor " + std::string(name));
    }
    std::string extra;
    if (row >> extra)
      throw ParseError(path, *line_no, "too many values in tensor " + std::string(name));
  }
  return m;
}

}  // namespace

void AdaptModel::Check() const {
  const Eigen::Index k = proj_weight.rows(), d = proj_weight.cols(),
                     c = cls_weight.rows();
  if (d < 1) throw InvalidArgument("input dimension must be >= 1");
  if (k < 2) throw InvalidArgument("latent dimension must be >= 2");
  if (c < 2) throw InvalidArgument("class count must be >= 2");
  if (proj_bias.size() != k) throw DimensionError("projection bias length mismatch");
  if (cls_weight.cols() != k) throw DimensionError("classifier weight width mismatch");
  if (cls_bias.size() != c) throw DimensionError("classifier bias length mismatch");
  if (!proj_weight.allFinite() || !proj_bias.allFinite() ||
      !cls_weight.allFinite() || !cls_bias.allFinite())
    throw NumericError("model has non-finite parameters");
}

ModelGradients ModelGradients::ZerosLike(const AdaptModel &model) {
  ModelGradients g;
  g.proj_weight = Matrix::Zero(model.proj_weight.rows(), model.proj_weight.cols());
  g.proj_bias = Vector::Zero(model.proj_bias.size());
  g.cls_weight = Matrix::Zero(model.cls_weight.rows(), model.cls_weight.cols());
  g.cls_bias = Vector::Zero(model.cls_bias.size());
  return g;
}

ModelGradients &ModelGradients::operator+=(const ModelGradients &other) {
  proj_weight += other.proj_weight;
  proj_bias += other.proj_bias;
  cls_weight += other.cls_weight;
  cls_bias += other.cls_bias;
  return *this;
}

ModelGradients &ModelGradients::operator*=(double factor) {
  proj_weight *= factor;
  proj_bias *= factor;
  cls_weight *= factor;
  cls_bias *= factor;
  return *this;
}

double ModelGradients::MaxAbs() const {
  return std::max({proj_weight.cwiseAbs().maxCoeff(), proj_bias.cwiseAbs().maxCoeff(),
                   cls_weight.cwiseAbs().maxCoeff(), cls_bias.cwiseAbs().maxCoeff()});
}

AdaptModel InitModel(int input_dim, int latent_dim, int n_classes,
                     std::uint64_t seed) {
  if (input_dim < 1 || latent_dim < 2 || n_classes < 2)
    throw InvalidArgument("InitModel needs d >= 1, k >= 2, C >= 2");
  Rng rng = MakeRng(seed, 0x6d6f64656cULL);
  auto xavier = [&rng](int fan_out, int fan_in) {
    std::normal_distribution<double> gauss(0.0, std::sqrt(2.0 / (fan_in + fan_out)));
    Matrix w(fan_out, fan_in);
    for (int r = 0; r < fan_out; r++)
      for (int c = 0; c < fan_in; c++) w(r, c) = gauss(rng);
    return w;
  };
  AdaptModel model;
  model.proj_weight = xavier(latent_dim, input_dim);
  model.proj_bias = Vector::Zero(latent_dim);
  model.cls_weight = xavier(n_classes, latent_dim);
  model.cls_bias = Vector::Zero(n_classes);
  return model;
}

Matrix Softmax(const Matrix &logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); r++) {
    double mx = logits.row(r).maxCoeff();
    out.row(r) = (logits.row(r).array() - mx).exp().matrix();
    out.row(r) /= out.row(r).sum();
  }
  return out;
}

ForwardCache Forward(const AdaptModel &model, const Matrix &inputs) {
  if (inputs.cols() != model.InputDim())
    throw DimensionError("input has dimension " + std::to_string(inputs.cols()) +
                         ", model expects " + std::to_string(model.InputDim()));
  ForwardCache cache;
  cache.input = inputs;
  cache.pre_norm = (inputs * model.proj_weight.transpose()).rowwise() +
                   model.proj_bias.transpose();
  cache.norm = (cache.pre_norm.rowwise().squaredNorm().array() + kNormStab).sqrt().matrix();
  cache.latent = cache.pre_norm.array().colwise() / cache.norm.array();
  cache.logits = (cache.latent * model.cls_weight.transpose()).rowwise() +
                 model.cls_bias.transpose();
  cache.probs = Softmax(cache.logits);
  return cache;
}

Matrix Project(const AdaptModel &model, const Matrix &inputs) {
  return Forward(model, inputs).latent;
}

Matrix Classify(const AdaptModel &model, const Matrix &latent) {
  if (latent.cols() != model.LatentDim())
    throw DimensionError("latent has dimension " + std::to_string(latent.cols()) +
                         ", model expects " + std::to_string(model.LatentDim()));
  Matrix logits = (latent * model.cls_weight.transpose()).rowwise() +
                  model.cls_bias.transpose();
  return Softmax(logits);
}

double CrossEntropy(const Matrix &targets, const Matrix &probs) {
  if (targets.rows() != probs.rows() || targets.cols() != probs.cols())
    throw DimensionError("cross entropy: target and prediction shapes differ");
  if (targets.rows() == 0) throw InvalidArgument("cross entropy of an empty batch");
  double total = 0.0;
  for (Eigen::Index r = 0; r < targets.rows(); r++)
    for (Eigen::Index c = 0; c < targets.cols(); c++)
      if (targets(r, c) != 0.0)
        total -= targets(r, c) * std::log(std::max(probs(r, c), kProbFloor));
  return total / static_cast<double>(targets.rows());
}

Matrix CrossEntropyLogitGradient(const Matrix &targets, const Matrix &probs) {
  if (targets.rows() != probs.rows() || targets.cols() != probs.cols())
    throw DimensionError("cross entropy: target and prediction shapes differ");
  return (probs - targets) / static_cast<double>(targets.rows());
}

ModelGradients Backward(const AdaptModel &model, const ForwardCache &cache,
                        const UpstreamGradients &upstream) {
  if (!cache.Valid()) throw InvalidArgument("Backward called without a forward pass");
  const Eigen::Index n = cache.input.rows(), k = model.LatentDim(),
                     c = model.NumClasses();
  CheckShape(cache.latent, n, k, "cached latent");
  CheckShape(cache.probs, n, c, "cached probabilities");

  Matrix d_logits = Matrix::Zero(n, c);
  if (upstream.d_logits.size() > 0) {
    CheckShape(upstream.d_logits, n, c, "d_logits");
    d_logits += upstream.d_logits;
  }
  if (upstream.d_probs.size() > 0) {
    CheckShape(upstream.d_probs, n, c, "d_probs");
    // Softmax Jacobian-vector product: p * (dp - <dp, p>).
    Vector inner = upstream.d_probs.cwiseProduct(cache.probs).rowwise().sum();
    d_logits += (cache.probs.array() *
                 (upstream.d_probs.colwise() - inner).array()).matrix();
  }

  ModelGradients grads;
  grads.cls_weight = d_logits.transpose() * cache.latent;
  grads.cls_bias = d_logits.colwise().sum().transpose();

  Matrix d_latent = d_logits * model.cls_weight;
  if (upstream.d_latent.size() > 0) {
    CheckShape(upstream.d_latent, n, k, "d_latent");
    d_latent += upstream.d_latent;
  }

  // z = a / s with s = sqrt(|a|^2 + stab):  da = dz / s - a (a . dz) / s^3.
  Matrix d_pre(n, k);
  for (Eigen::Index r = 0; r < n; r++) {
    double s = cache.norm(r);
    double a_dot = cache.pre_norm.row(r).dot(d_latent.row(r));
    d_pre.row(r) = d_latent.row(r) / s - cache.pre_norm.row(r) * (a_dot / (s * s * s));
  }
  grads.proj_weight = d_pre.transpose() * cache.input;
  grads.proj_bias = d_pre.colwise().sum().transpose();
  return grads;
}

AdamState AdamState::For(const AdaptModel &model, double learning_rate) {
  AdamState state;
  state.first_moment = ModelGradients::ZerosLike(model);
  state.second_moment = ModelGradients::ZerosLike(model);
  state.learning_rate = learning_rate;
  return state;
}

void AdamStep(AdaptModel *model, const ModelGradients &grads, AdamState *state) {
  auto same = [](const auto &a, const auto &b) {
    return a.rows() == b.rows() && a.cols() == b.cols();
  };
  if (!same(grads.proj_weight, model->proj_weight) ||
      !same(grads.proj_bias, model->proj_bias) ||
      !same(grads.cls_weight, model->cls_weight) ||
      !same(grads.cls_bias, model->cls_bias) ||
      !same(state->first_moment.proj_weight, model->proj_weight) ||
      !same(state->first_moment.cls_weight, model->cls_weight))
    throw DimensionError("Adam: gradient/state shapes do not match the model");

  state->step++;
  const double b1 = state->beta1, b2 = state->beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(state->step));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(state->step));
  const double lr = state->learning_rate, eps = state->eps;

  ForEachTensor(*model, grads, state->first_moment, state->second_moment,
                [&](auto &param, const auto &g, auto &m, auto &v) {
                  m = b1 * m + (1.0 - b1) * g;
                  v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
                  param.array() -= lr * (m.array() / correction1) /
                                   ((v.array() / correction2).sqrt() + eps);
                });
}

void SaveCheckpoint(const AdaptModel &model, const std::string &path) {
  model.Check();
  std::FILE *fp = std::fopen(path.c_str(), "w");
  if (fp == nullptr) throw IoError("cannot open " + path + " for writing");
  std::fprintf(fp, "%s %d\n", kCheckpointMagic, kCheckpointVersion);
  std::fprintf(fp, "%d %d %d\n", model.InputDim(), model.LatentDim(),
               model.NumClasses());
  WriteTensor(fp, "proj_weight", model.proj_weight);
  WriteTensor(fp, "proj_bias", model.proj_bias.transpose());
  WriteTensor(fp, "cls_weight", model.cls_weight);
  WriteTensor(fp, "cls_bias", model.cls_bias.transpose());
  bool bad = std::ferror(fp) != 0;
  if (std::fclose(fp) != 0 || bad) throw IoError("error writing " + path);
}

AdaptModel LoadCheckpoint(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open checkpoint " + path);
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(is, line)) throw ParseError(path, 1, "empty checkpoint");
  line_no++;
  {
    std::istringstream head(line);
    std::string magic;
    int version = 0;
    head >> magic >> version;
    if (magic != kCheckpointMagic) throw ParseError(path, line_no, "not a jdapot checkpoint");
    if (version != kCheckpointVersion)
      throw ParseError(path, line_no, "unsupported checkpoint version " +
                                          std::to_string(version));
  }
  int d = 0, k = 0, c = 0;
  if (!std::getline(is, line)) throw ParseError(path, 2, "missing dimensions");
  line_no++;
  {
    std::istringstream dims(line);
    if (!(dims >> d >> k >> c) || d < 1 || k < 2 || c < 2)
      throw ParseError(path, line_no, "bad dimensions line");
  }
  AdaptModel model;
  model.proj_weight = ReadTensor(is, path, &line_no, "proj_weight", k, d);
  model.proj_bias = ReadTensor(is, path, &line_no, "proj_bias", 1, k).transpose();
  model.cls_weight = ReadTensor(is, path, &line_no, "cls_weight", c, k);
  model.cls_bias = ReadTensor(is, path, &line_no, "cls_bias", 1, c).transpose();
  model.Check();
  return model;
}

}  // namespace jdapot
