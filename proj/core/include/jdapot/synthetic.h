// core/include/jdapot/synthetic.h

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

#ifndef JDAPOT_SYNTHETIC_H_
#define JDAPOT_SYNTHETIC_H_

#include <cstdint>
#include <utility>
#include <vector>

#include "jdapot/embedding_set.h"

namespace jdapot {

/// Parameters of the synthetic partial-label-shift generator.
///
/// The source domain holds one isotropic Gaussian cluster per class.  The
/// target domain holds only the classes listed in target_class_subset; each
/// target sample is drawn from the matching source cluster and then shifted:
/// every coordinate plane (0,1), (2,3), ... is rotated by
/// shift_rotation_angle, a fixed translation of length shift_translation_scale
/// (direction drawn from the seed) is added, and finally isotropic noise with
/// standard deviation noise_scale.
struct SynthConfig {
  int dim = 64;
  int n_source_classes = 10;
  std::vector<int> target_class_subset = {1, 2, 5, 7, 8, 9};
  int samples_per_class_source = 200;
  int samples_per_class_target = 200;
  double cluster_spread = 1.0;
  /// Distance between any two class means, in units of cluster_spread.
  double mean_separation = 5.0;
  double shift_rotation_angle = 0.6;
  double shift_translation_scale = 6.0;
  double noise_scale = 0.5;
  std::uint64_t seed = 2022;

  void Check() const;
};

/// Minimum allowed mean_separation (in units of cluster_spread).
inline constexpr double kMinMeanSeparation = 4.0;

/// Returns the class means (n_source_classes x dim) used by GenerateSynthetic.
Matrix SyntheticClassMeans(const SynthConfig &config);

/// Returns (source, target).  Both carry their true labels; identical configs
/// give bit-identical output.
std::pair<EmbeddingSet, EmbeddingSet> GenerateSynthetic(const SynthConfig &config);

}  // namespace jdapot

#endif  // JDAPOT_SYNTHETIC_H_
