// core/include/jdapot/embedding_set.h

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

#ifndef JDAPOT_EMBEDDING_SET_H_
#define JDAPOT_EMBEDDING_SET_H_

#include <string>
#include <vector>

#include "jdapot/types.h"

namespace jdapot {

inline constexpr int kUnknownLabel = -1;

enum class Domain { kSource, kTarget };

/// A collection of fixed-dimension embedding vectors (one per row) with an
/// optional class label per row.  Labels are in [0, n_classes) or
/// kUnknownLabel.
struct EmbeddingSet {
  Matrix vectors;
  std::vector<int> labels;
  Domain domain = Domain::kSource;
  int n_classes = 0;

  int NumSamples() const { return static_cast<int>(vectors.rows()); }
  int Dim() const { return static_cast<int>(vectors.cols()); }
  bool AllLabelsKnown() const;
  bool AnyLabelKnown() const;

  /// Throws InvalidArgument / DimensionError if the invariants do not hold.
  void Check() const;
};

/// Reads the embedding CSV format:
///   line 1:      dim,n_classes
///   line 2..:    label,f1,...,fdim        (label -1 == unknown)
/// Throws IoError if the file cannot be opened and ParseError (with the line
/// number) for malformed content.
EmbeddingSet LoadEmbeddings(const std::string &path,
                            Domain domain = Domain::kSource);

/// Writes `set` in the format read by LoadEmbeddings, using 17 significant
/// digits so the values survive the round trip exactly.
void SaveEmbeddings(const EmbeddingSet &set, const std::string &path);

struct MiniBatch {
  std::vector<int> indices;
  Matrix vectors;
  std::vector<int> labels;
};

/// Draws `size` distinct rows uniformly at random (partial Fisher-Yates).
/// Throws InvalidArgument unless 1 <= size <= set.NumSamples().
MiniBatch SampleMiniBatch(const EmbeddingSet &set, int size, Rng &rng);

/// Gathers the given rows into a batch without any sampling.
MiniBatch GatherRows(const EmbeddingSet &set, const std::vector<int> &indices);

/// One-hot encoding of known labels; throws InvalidArgument on an unknown one.
Matrix OneHot(const std::vector<int> &labels, int n_classes);

}  // namespace jdapot

#endif  // JDAPOT_EMBEDDING_SET_H_
