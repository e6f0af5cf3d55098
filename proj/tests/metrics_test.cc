// tests/metrics_test.cc

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

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "jdapot/errors.h"
#include "oracles.h"
#include "test_util.h"

namespace jdapot {
namespace {

using testing::BruteForceCavg;
using testing::BruteForceEer;
using testing::RandomTrialScores;

TEST(EqualErrorRate, Examples) {
  EXPECT_EQ(EqualErrorRate({0.9, 0.8, 0.7}, {0.1, 0.5, 0.6}), 0.0);
  EXPECT_EQ(EqualErrorRate({0.1}, {0.9}), 1.0);
  EXPECT_EQ(EqualErrorRate({0.8, 0.2}, {0.9, 0.1}), 0.5);
  EXPECT_THROW(EqualErrorRate({}, {0.1}), InvalidArgument);
  EXPECT_THROW(EqualErrorRate({0.1}, {}), InvalidArgument);
}

TEST(EqualErrorRate, InterpolatedCrossing) {
  // A tied target / non-target pair moves both rates at once: the points
  // (miss, fa) = (0, 1/2) at t=0.5 and (1/2, 0) at t=0.9 bracket the
  // crossing, which the segment between them meets at 1/4.
  EXPECT_NEAR(EqualErrorRate({0.5, 0.9}, {0.5, 0.1}), 0.25, 1e-15);
}

TEST(EqualErrorRate, MatchesBruteForceOracle) {
  Rng rng(31);
  for (int trial = 0; trial < 300; trial++) {
    TrialScores t = RandomTrialScores(rng);
    std::vector<double> tar, non;
    testing::PooledPairs(t, &tar, &non);
    testing::EerOracleResult oracle = BruteForceEer(tar, non);
    const double eer = EqualErrorRate(tar, non);
    if (oracle.at_operating_point)
      EXPECT_EQ(eer, oracle.eer);
    else
      EXPECT_NEAR(eer, oracle.eer, 1e-12);
    EXPECT_EQ(Eer(t), eer);
    EXPECT_GE(eer, 0.0);
    EXPECT_LE(eer, 1.0);
  }
}

TEST(EqualErrorRate, InvariantUnderIncreasingTransforms) {
  Rng rng(32);
  for (int trial = 0; trial < 100; trial++) {
    TrialScores t = RandomTrialScores(rng);
    TrialScores affine = t, cubic = t;
    affine.scores = (t.scores.array() * 3.0 - 7.0).matrix();
    cubic.scores = t.scores.array().cube().matrix();
    EXPECT_NEAR(Eer(affine), Eer(t), 1e-12);
    EXPECT_NEAR(Eer(cubic), Eer(t), 1e-12);
  }
}

TEST(Eer, PerLanguageMean) {
  TrialScores t;
  t.scores.resize(4, 2);
  t.scores << 0.9, 0.1,
              0.6, 0.4,
              0.3, 0.7,
              0.55, 0.45;
  t.true_labels = {0, 0, 1, 1};
  EerOptions per;
  per.per_language_mean = true;
  const double l0 = EqualErrorRate({0.9, 0.6}, {0.3, 0.55});
  const double l1 = EqualErrorRate({0.7, 0.45}, {0.1, 0.4});
  EXPECT_DOUBLE_EQ(Eer(t, per), 0.5 * (l0 + l1));
}

TrialScores Perfect(int n_lang, int per_lang) {
  TrialScores t;
  t.scores = Matrix::Zero(n_lang * per_lang, n_lang);
  for (int i = 0; i < n_lang * per_lang; i++) {
    t.true_labels.push_back(i % n_lang);
    t.scores(i, i % n_lang) = 1.0;
  }
  return t;
}

TEST(Cavg, Examples) {
  TrialScores t = Perfect(3, 4);
  EXPECT_EQ(Cavg(t, 0.5, 0.5), 0.0);
  EXPECT_EQ(Cavg(t, 0.5, -std::numeric_limits<double>::infinity()), 0.5);

  // Language 0 always right, language 1 always missed, nothing accepted
  // falsely: (1/2)(0 + 0.5 * 1).
  TrialScores half;
  half.scores.resize(4, 2);
  half.scores << 0.9, 0.1,
                 0.8, 0.2,
                 0.1, 0.3,
                 0.2, 0.1;
  half.true_labels = {0, 0, 1, 1};
  EXPECT_EQ(Cavg(half, 0.5, 0.5), 0.25);
}

TEST(Cavg, MatchesBruteForceOracleAtEveryOperatingPoint) {
  Rng rng(33);
  for (int trial = 0; trial < 100; trial++) {
    TrialScores t = RandomTrialScores(rng, 60, 5);
    std::set<double> thresholds(t.scores.data(), t.scores.data() + t.scores.size());
    for (double th : thresholds) EXPECT_EQ(Cavg(t, 0.5, th), BruteForceCavg(t, 0.5, th));
    const double c = Cavg(t, 0.5, 0.0);
    EXPECT_GE(c, 0.0);
    EXPECT_LE(c, 1.0);
  }
}

TEST(Cavg, CorrectingAnErrorNeverHurts) {
  Rng rng(34);
  std::uniform_int_distribution<int> pick(0, 1 << 20);
  for (int trial = 0; trial < 200; trial++) {
    TrialScores t = RandomTrialScores(rng, 40, 4);
    const int i = pick(rng) % t.NumTrials(), l = pick(rng) % t.NumLanguages();
    TrialScores fixed = t;
    // Move the score to the right side of the threshold.
    fixed.scores(i, l) = l == t.true_labels[i] ? 5.0 : -5.0;
    EXPECT_LE(Cavg(fixed, 0.5, 0.0), Cavg(t, 0.5, 0.0));
  }
}

TEST(Cavg, Validation) {
  TrialScores t = Perfect(3, 2);
  t.true_labels = {0, 0, 1, 1, 0, 1};
  EXPECT_THROW(Cavg(t, 0.5, 0.5), InvalidArgument);  // language 2 has no trials
  TrialScores one = Perfect(1, 2);
  EXPECT_THROW(Cavg(one, 0.5, 0.5), InvalidArgument);
  TrialScores bad = Perfect(2, 2);
  bad.true_labels[0] = 2;
  EXPECT_THROW(Eer(bad), InvalidArgument);
}

TEST(RestrictToPresentLanguages, DropsAbsentColumns) {
  TrialScores t;
  t.scores.resize(3, 4);
  t.scores << 0, 1, 2, 3,
              4, 5, 6, 7,
              8, 9, 10, 11;
  t.true_labels = {3, 1, 3};
  TrialScores r = RestrictToPresentLanguages(t);
  ASSERT_EQ(r.NumLanguages(), 2);
  EXPECT_EQ(r.true_labels, (std::vector<int>{1, 0, 1}));
  EXPECT_EQ(r.scores(1, 0), 5);
  EXPECT_EQ(r.scores(2, 1), 11);
}

TEST(Accuracy, Examples) {
  std::vector<int> a = {0, 1, 2, 3};
  EXPECT_EQ(Accuracy(a, a), 1.0);
  EXPECT_EQ(Accuracy(a, {1, 2, 3, 0}), 0.0);
  EXPECT_EQ(Accuracy(a, {0, 1, 2, 0}), 0.75);
  EXPECT_THROW(Accuracy(a, {0}), DimensionError);
}

TEST(TrialScoresIo, RoundTrip) {
  testing::TempDir dir;
  Rng rng(35);
  TrialScores t = RandomTrialScores(rng, 30, 4);
  t.scores += testing::RandomMatrix(t.NumTrials(), t.NumLanguages(), rng, 0.0, 1e-3);
  SaveTrialScores(t, dir.File("s.csv"));
  TrialScores back = LoadTrialScores(dir.File("s.csv"));
  EXPECT_EQ(back.true_labels, t.true_labels);
  EXPECT_TRUE(back.scores == t.scores);
}

}  // namespace
}  // namespace jdapot
