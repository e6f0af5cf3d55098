// core/include/jdapot/metrics.h

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

#ifndef JDAPOT_METRICS_H_
#define JDAPOT_METRICS_H_

#include <string>
#include <vector>

#include "jdapot/types.h"

namespace jdapot {

/// Per-trial, per-language detection scores (higher = more likely).
struct TrialScores {
  Matrix scores;                // n_trials x n_languages
  std::vector<int> true_labels;  // per trial, in [0, n_languages)

  int NumTrials() const { return static_cast<int>(scores.rows()); }
  int NumLanguages() const { return static_cast<int>(scores.cols()); }
  void Check() const;
};

/// Keeps only the languages that occur among the true labels, relabelled
/// 0..n-1 in increasing order of the original id.  Used when a test set
/// covers a subset of the classifier's languages.
TrialScores RestrictToPresentLanguages(const TrialScores &trials);

/// Equal error rate over target / non-target scores.  P_miss(t) is the
/// fraction of target scores < t, P_fa(t) the fraction of non-target scores
/// >= t; thresholds are swept over every distinct score (plus +inf) and the
/// crossing is linearly interpolated between the two operating points that
/// bracket it.  Throws InvalidArgument if either list is empty.
double EqualErrorRate(std::vector<double> target_scores,
                      std::vector<double> nontarget_scores);

struct EerOptions {
  /// Average the per-language EERs instead of pooling every
  /// (trial, language) pair.
  bool per_language_mean = false;
};

/// Pooled EER: every (trial, language) pair is a target pair if the language
/// is the trial's true label and a non-target pair otherwise.
double Eer(const TrialScores &trials, const EerOptions &opts = {});

/// Average detection cost over all target / non-target language pairs with a
/// fixed decision threshold.
double Cavg(const TrialScores &trials, double p_target, double decision_threshold);

double Accuracy(const std::vector<int> &predicted, const std::vector<int> &truth);

/// Scores CSV: one line per trial, "true_label,s_0,...,s_{N-1}" (no header).
void SaveTrialScores(const TrialScores &trials, const std::string &path);
TrialScores LoadTrialScores(const std::string &path);

}  // namespace jdapot

#endif  // JDAPOT_METRICS_H_
