// core/src/embedding_set.cc

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

#include "jdapot/embedding_set.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <string_view>

#include "jdapot/errors.h"

namespace jdapot {

namespace {

std::vector<std::string_view> SplitCommas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

bool ParseInt(std::string_view s, int *out) {
  s = Trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), *out);
  return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}

bool ParseDouble(std::string_view s, double *out) {
  s = Trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), *out);
  return ec == std::errc() && ptr == s.data() + s.size() && !s.empty() &&
         std::isfinite(*out);
}

}  // namespace

bool EmbeddingSet::AllLabelsKnown() const {
  for (int l : labels)
    if (l == kUnknownLabel) return false;
  return true;
}

bool EmbeddingSet::AnyLabelKnown() const {
  for (int l : labels)
    if (l != kUnknownLabel) return true;
  return false;
}

void EmbeddingSet::Check() const {
  if (vectors.rows() < 1)
    throw InvalidArgument("embedding set must contain at least one sample");
  if (vectors.cols() < 1)
    throw InvalidArgument("embedding dimension must be at least 1");
  if (static_cast<Eigen::Index>(labels.size()) != vectors.rows())
    throw DimensionError("embedding set has " + std::to_string(vectors.rows()) +
                         " rows but " + std::to_string(labels.size()) +
                         " labels");
  if (n_classes < 1) throw InvalidArgument("n_classes must be at least 1");
  for (std::size_t i = 0; i < labels.size(); i++) {
    int l = labels[i];
    if (l != kUnknownLabel && (l < 0 || l >= n_classes))
      throw InvalidArgument("label " + std::to_string(l) + " of sample " +
                            std::to_string(i) + " outside [0, " +
                            std::to_string(n_classes) + ")");
  }
  if (!vectors.allFinite())
    throw InvalidArgument("embedding set contains non-finite values");
}

EmbeddingSet LoadEmbeddings(const std::string &path, Domain domain) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open embedding file " + path);

  std::string line;
  std::size_t line_no = 0;
  int dim = 0, n_classes = 0;

  // Header.
  while (std::getline(is, line)) {
    line_no++;
    if (!Trim(line).empty()) break;
  }
  {
    auto fields = SplitCommas(line);
    if (line_no == 0 || fields.size() != 2 || !ParseInt(fields[0], &dim) ||
        !ParseInt(fields[1], &n_classes))
      throw ParseError(path, std::max<std::size_t>(line_no, 1),
                       "expected header \"dim,n_classes\"");
    if (dim < 1 || n_classes < 1)
      throw ParseError(path, line_no, "dim and n_classes must be positive");
  }

  std::vector<double> values;
  std::vector<int> labels;
  while (std::getline(is, line)) {
    line_no++;
    if (Trim(line).empty()) continue;
    auto fields = SplitCommas(line);
    if (fields.size() != static_cast<std::size_t>(dim) + 1)
      throw ParseError(path, line_no,
                       "expected " + std::to_string(dim + 1) + " fields, got " +
                           std::to_string(fields.size()));
    int label;
    if (!ParseInt(fields[0], &label))
      throw ParseError(path, line_no, "label is not an integer");
    if (label != kUnknownLabel && (label < 0 || label >= n_classes))
      throw ParseError(path, line_no,
                       "label " + std::to_string(label) + " outside [0, " +
                           std::to_string(n_classes) + ") and not -1");
    for (int d = 0; d < dim; d++) {
      double v;
      if (!ParseDouble(fields[d + 1], &v))
        throw ParseError(path, line_no,
                         "field " + std::to_string(d + 2) +
                             " is not a finite number");
      values.push_back(v);
    }
    labels.push_back(label);
  }
  if (labels.empty())
    throw ParseError(path, line_no + 1, "file contains no samples");

  EmbeddingSet set;
  set.domain = domain;
  set.n_classes = n_classes;
  set.labels = std::move(labels);
  set.vectors.resize(static_cast<Eigen::Index>(set.labels.size()), dim);
  for (Eigen::Index r = 0; r < set.vectors.rows(); r++)
    for (int d = 0; d < dim; d++) set.vectors(r, d) = values[r * dim + d];
  return set;
}

void SaveEmbeddings(const EmbeddingSet &set, const std::string &path) {
  set.Check();
  std::FILE *fp = std::fopen(path.c_str(), "w");
  if (fp == nullptr) throw IoError("cannot open " + path + " for writing");
  bool ok = std::fprintf(fp, "%d,%d\n", set.Dim(), set.n_classes) > 0;
  for (int r = 0; r < set.NumSamples() && ok; r++) {
    ok = std::fprintf(fp, "%d", set.labels[r]) > 0;
    for (int d = 0; d < set.Dim() && ok; d++)
      ok = std::fprintf(fp, ",%.17g", set.vectors(r, d)) > 0;
    ok = ok && std::fputc('\n', fp) != EOF;
  }
  if (std::fclose(fp) != 0 || !ok) throw IoError("error writing " + path);
}

MiniBatch SampleMiniBatch(const EmbeddingSet &set, int size, Rng &rng) {
  const int n = set.NumSamples();
  if (size < 1 || size > n)
    throw InvalidArgument("mini-batch size " + std::to_string(size) +
                          " outside [1, " + std::to_string(n) + "]");
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = 0; i < size; i++) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(perm[i], perm[pick(rng)]);
  }
  perm.resize(size);
  return GatherRows(set, perm);
}

MiniBatch GatherRows(const EmbeddingSet &set, const std::vector<int> &indices) {
  MiniBatch batch;
  batch.indices = indices;
  batch.vectors.resize(static_cast<Eigen::Index>(indices.size()), set.Dim());
  batch.labels.resize(indices.size());
  for (std::size_t i = 0; i < indices.size(); i++) {
    int idx = indices[i];
    if (idx < 0 || idx >= set.NumSamples())
      throw InvalidArgument("row index " + std::to_string(idx) + " out of range");
    batch.vectors.row(static_cast<Eigen::Index>(i)) = set.vectors.row(idx);
    batch.labels[i] = set.labels[idx];
  }
  return batch;
}

Matrix OneHot(const std::vector<int> &labels, int n_classes) {
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(labels.size()), n_classes);
  for (std::size_t i = 0; i < labels.size(); i++) {
    if (labels[i] < 0 || labels[i] >= n_classes)
      throw InvalidArgument("cannot one-hot encode label " +
                            std::to_string(labels[i]));
    out(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
  }
  return out;
}

}  // namespace jdapot
