// core/src/synthetic.cc

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

#include "jdapot/synthetic.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "jdapot/errors.h"

namespace jdapot {

namespace {

enum Stream : std::uint64_t {
  kMeansStream = 1,
  kSourceStream = 2,
  kTargetStream = 3,
  kShiftStream = 4
};

Matrix GaussianMatrix(Eigen::Index rows, Eigen::Index cols, Rng &rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix m(rows, cols);
  // Explicit row-major fill so the draw order does not depend on storage.
  for (Eigen::Index r = 0; r < rows; r++)
    for (Eigen::Index c = 0; c < cols; c++) m(r, c) = gauss(rng);
  return m;
}

double MinPairwiseDistance(const Matrix &points) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < points.rows(); i++)
    for (Eigen::Index j = i + 1; j < points.rows(); j++)
      best = std::min(best, (points.row(i) - points.row(j)).norm());
  return best;
}

}  // namespace

void SynthConfig::Check() const {
  if (dim < 1) throw InvalidArgument("dim must be >= 1");
  if (n_source_classes < 1)
    throw InvalidArgument("n_source_classes must be >= 1");
  if (target_class_subset.empty())
    throw InvalidArgument("target_class_subset must not be empty");
  std::set<int> seen;
  for (int c : target_class_subset) {
    if (c < 0 || c >= n_source_classes)
      throw InvalidArgument("target class " + std::to_string(c) +
                            " outside [0, " + std::to_string(n_source_classes) +
                            ")");
    if (!seen.insert(c).second)
      throw InvalidArgument("target class " + std::to_string(c) +
                            " listed twice");
  }
  if (samples_per_class_source < 1 || samples_per_class_target < 1)
    throw InvalidArgument("samples per class must be >= 1");
  if (!(cluster_spread > 0.0) || !std::isfinite(cluster_spread))
    throw InvalidArgument("cluster_spread must be positive");
  if (!(mean_separation >= kMinMeanSeparation))
    throw InvalidArgument("mean_separation must be >= 4");
  if (!(noise_scale >= 0.0)) throw InvalidArgument("noise_scale must be >= 0");
  if (!std::isfinite(shift_rotation_angle) ||
      !std::isfinite(shift_translation_scale))
    throw InvalidArgument("shift parameters must be finite");
}

Matrix SyntheticClassMeans(const SynthConfig &config) {
  config.Check();
  const int n = config.n_source_classes, d = config.dim;
  const double separation = config.mean_separation * config.cluster_spread;
  Rng rng = MakeRng(config.seed, kMeansStream);

  if (n == 1) return Matrix::Zero(1, d);

  Matrix means;
  if (n <= d) {
    // Orthonormal directions from a QR factorisation: every pair of means is
    // then exactly radius * sqrt(2) apart.
    Matrix g = GaussianMatrix(d, n, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(d, n);
    means = q.transpose() * (separation / std::sqrt(2.0));
  } else {
    // More classes than dimensions: random points rescaled so the closest
    // pair sits at the requested separation.
    means = GaussianMatrix(n, d, rng);
    double closest = MinPairwiseDistance(means);
    if (!(closest > 0.0)) throw NumericError("degenerate class means");
    means *= separation / closest;
  }
  return means;
}

std::pair<EmbeddingSet, EmbeddingSet> GenerateSynthetic(const SynthConfig &config) {
  config.Check();
  const int d = config.dim;
  const Matrix means = SyntheticClassMeans(config);

  EmbeddingSet source;
  source.domain = Domain::kSource;
  source.n_classes = config.n_source_classes;
  source.vectors.resize(
      static_cast<Eigen::Index>(config.n_source_classes) *
          config.samples_per_class_source, d);
  {
    Rng rng = MakeRng(config.seed, kSourceStream);
    Matrix noise = GaussianMatrix(source.vectors.rows(), d, rng);
    Eigen::Index row = 0;
    for (int c = 0; c < config.n_source_classes; c++) {
      for (int s = 0; s < config.samples_per_class_source; s++, row++) {
        source.vectors.row(row) =
            means.row(c) + config.cluster_spread * noise.row(row);
        source.labels.push_back(c);
      }
    }
  }

  Vector translation = Vector::Zero(d);
  {
    Rng rng = MakeRng(config.seed, kShiftStream);
    Matrix dir = GaussianMatrix(1, d, rng);
    double norm = dir.norm();
    if (norm > 0.0)
      translation = dir.row(0).transpose() * (config.shift_translation_scale / norm);
  }
  const double cos_t = std::cos(config.shift_rotation_angle);
  const double sin_t = std::sin(config.shift_rotation_angle);

  EmbeddingSet target;
  target.domain = Domain::kTarget;
  target.n_classes = config.n_source_classes;
  const int n_target =
      static_cast<int>(config.target_class_subset.size()) *
      config.samples_per_class_target;
  target.vectors.resize(n_target, d);
  {
    Rng rng = MakeRng(config.seed, kTargetStream);
    Matrix draw = GaussianMatrix(n_target, d, rng);
    Matrix noise = GaussianMatrix(n_target, d, rng);
    Eigen::Index row = 0;
    for (int c : config.target_class_subset) {
      for (int s = 0; s < config.samples_per_class_target; s++, row++) {
        Vector x = means.row(c).transpose() +
                   config.cluster_spread * draw.row(row).transpose();
        for (int p = 0; p + 1 < d; p += 2) {
          double a = x(p), b = x(p + 1);
          x(p) = cos_t * a - sin_t * b;
          x(p + 1) = sin_t * a + cos_t * b;
        }
        x += translation;
        x += config.noise_scale * noise.row(row).transpose();
        target.vectors.row(row) = x.transpose();
        target.labels.push_back(c);
      }
    }
  }
  return {std::move(source), std::move(target)};
}

}  // namespace jdapot
