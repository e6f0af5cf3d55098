// core/src/metrics.cc

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

#include "jdapot/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "jdapot/errors.h"

namespace jdapot {

void TrialScores::Check() const {
  if (scores.rows() < 1) throw InvalidArgument("no trials");
  if (static_cast<Eigen::Index>(true_labels.size()) != scores.rows())
    throw DimensionError("score rows and label count differ");
  if (!scores.allFinite()) throw InvalidArgument("scores must be finite");
  for (int l : true_labels)
    if (l < 0 || l >= NumLanguages())
      throw InvalidArgument("trial label " + std::to_string(l) + " out of range");
}

TrialScores RestrictToPresentLanguages(const TrialScores &trials) {
  trials.Check();
  std::vector<int> present(trials.NumLanguages(), -1);
  for (int l : trials.true_labels) present[l] = 0;
  std::vector<int> columns;
  for (int l = 0; l < trials.NumLanguages(); l++)
    if (present[l] == 0) {
      present[l] = static_cast<int>(columns.size());
      columns.push_back(l);
    }
  TrialScores out;
  out.scores.resize(trials.scores.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); c++)
    out.scores.col(static_cast<Eigen::Index>(c)) = trials.scores.col(columns[c]);
  for (int l : trials.true_labels) out.true_labels.push_back(present[l]);
  return out;
}

double EqualErrorRate(std::vector<double> target, std::vector<double> nontarget) {
  if (target.empty() || nontarget.empty())
    throw InvalidArgument("EER needs at least one target and one non-target score");
  std::sort(target.begin(), target.end());
  std::sort(nontarget.begin(), nontarget.end());
  std::vector<double> thresholds(target);
  thresholds.insert(thresholds.end(), nontarget.begin(), nontarget.end());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  thresholds.push_back(std::numeric_limits<double>::infinity());

  const double nt = static_cast<double>(target.size());
  const double nn = static_cast<double>(nontarget.size());
  double prev_miss = 0.0, prev_fa = 0.0;
  for (std::size_t k = 0; k < thresholds.size(); k++) {
    const double t = thresholds[k];
    // # targets < t and # non-targets >= t.
    auto misses = std::lower_bound(target.begin(), target.end(), t) - target.begin();
    auto below = std::lower_bound(nontarget.begin(), nontarget.end(), t) - nontarget.begin();
    const double miss = static_cast<double>(misses) / nt;
    const double fa = static_cast<double>(nontarget.size() - below) / nn;
    const double diff = miss - fa;
    if (diff == 0.0) return miss;
    if (diff > 0.0) {
      // k == 0 cannot get here: at the smallest score miss = 0 and fa = 1.
      const double prev_diff = prev_miss - prev_fa;
      const double s = -prev_diff / (diff - prev_diff);
      return prev_miss + s * (miss - prev_miss);
    }
    prev_miss = miss;
    prev_fa = fa;
  }
  return prev_miss;  // unreachable: the +inf threshold has miss 1, fa 0
}

double Eer(const TrialScores &trials, const EerOptions &opts) {
  trials.Check();
  const int n_lang = trials.NumLanguages();
  if (!opts.per_language_mean) {
    std::vector<double> tar, non;
    for (int i = 0; i < trials.NumTrials(); i++)
      for (int l = 0; l < n_lang; l++)
        (l == trials.true_labels[i] ? tar : non).push_back(trials.scores(i, l));
    return EqualErrorRate(std::move(tar), std::move(non));
  }
  double sum = 0.0;
  int used = 0;
  for (int l = 0; l < n_lang; l++) {
    std::vector<double> tar, non;
    for (int i = 0; i < trials.NumTrials(); i++)
      (trials.true_labels[i] == l ? tar : non).push_back(trials.scores(i, l));
    if (tar.empty() || non.empty()) continue;
    sum += EqualErrorRate(std::move(tar), std::move(non));
    used++;
  }
  if (used == 0) throw InvalidArgument("no language has both target and non-target trials");
  return sum / used;
}

double Cavg(const TrialScores &trials, double p_target, double decision_threshold) {
  trials.Check();
  const int n_lang = trials.NumLanguages();
  if (n_lang < 2) throw InvalidArgument("Cavg needs at least two languages");
  if (!(p_target >= 0.0 && p_target <= 1.0))
    throw InvalidArgument("p_target must lie in [0, 1]");

  std::vector<int> count(n_lang, 0);
  for (int l : trials.true_labels) count[l]++;
  for (int l = 0; l < n_lang; l++)
    if (count[l] == 0)
      throw InvalidArgument("language " + std::to_string(l) + " has no trials");

  // accepted(t, n): number of trials of language n whose language-t score
  // clears the threshold.
  Eigen::MatrixXi accepted = Eigen::MatrixXi::Zero(n_lang, n_lang);
  for (int i = 0; i < trials.NumTrials(); i++)
    for (int t = 0; t < n_lang; t++)
      if (trials.scores(i, t) >= decision_threshold) accepted(t, trials.true_labels[i])++;

  const double p_non = (1.0 - p_target) / (n_lang - 1);
  double total = 0.0;
  for (int t = 0; t < n_lang; t++) {
    double p_miss = static_cast<double>(count[t] - accepted(t, t)) / count[t];
    double fa_sum = 0.0;
    for (int n = 0; n < n_lang; n++)
      if (n != t) fa_sum += static_cast<double>(accepted(t, n)) / count[n];
    total += p_target * p_miss + p_non * fa_sum;
  }
  return total / n_lang;
}

double Accuracy(const std::vector<int> &predicted, const std::vector<int> &truth) {
  if (predicted.size() != truth.size())
    throw DimensionError("prediction and truth lengths differ");
  if (truth.empty()) throw InvalidArgument("accuracy of an empty set");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); i++) hits += predicted[i] == truth[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

void SaveTrialScores(const TrialScores &trials, const std::string &path) {
  std::FILE *fp = std::fopen(path.c_str(), "w");
  if (fp == nullptr) throw IoError("cannot open " + path + " for writing");
  for (int i = 0; i < trials.NumTrials(); i++) {
    std::fprintf(fp, "%d", trials.true_labels[i]);
    for (int l = 0; l < trials.NumLanguages(); l++)
      std::fprintf(fp, ",%.17g", trials.scores(i, l));
    std::fputc('\n', fp);
  }
  bool bad = std::ferror(fp) != 0;
  if (std::fclose(fp) != 0 || bad) throw IoError("error writing " + path);
}

TrialScores LoadTrialScores(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open scores file " + path);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    line_no++;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    int label;
    if (!(fields >> label)) throw ParseError(path, line_no, "bad label");
    std::vector<double> row;
    double v;
    while (fields >> v) row.push_back(v);
    if (!fields.eof()) throw ParseError(path, line_no, "non-numeric score");
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError(path, line_no, "ragged score row");
    if (row.empty()) throw ParseError(path, line_no, "no scores");
    rows.push_back(std::move(row));
    labels.push_back(label);
  }
  if (rows.empty()) throw ParseError(path, 1, "no trials");
  TrialScores trials;
  trials.scores.resize(static_cast<Eigen::Index>(rows.size()),
                       static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); i++)
    for (std::size_t j = 0; j < rows[i].size(); j++)
      trials.scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  trials.true_labels = std::move(labels);
  trials.Check();
  return trials;
}

}  // namespace jdapot
