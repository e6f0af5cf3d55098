// core/include/jdapot/pot_weighting.h

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

#ifndef JDAPOT_POT_WEIGHTING_H_
#define JDAPOT_POT_WEIGHTING_H_

#include "jdapot/ot_solver.h"
#include "jdapot/types.h"

namespace jdapot {

/// Partial-coupling weights.  A source/target pair whose transport cost is at
/// most `cost_threshold` is admissible; `scale` sets how sharply the soft
/// weight falls off around the threshold.
struct PotParams {
  double cost_threshold = 1.0;
  double scale = 5.0;

  void Check() const;
};

/// Numerically stable logistic function 1 / (1 + exp(-x)).
double Logistic(double x);

/// 1 where cost <= threshold, 0 elsewhere.
Matrix HardWeight(const Matrix &cost, const PotParams &params);

/// logistic(-scale * (cost - threshold)) entrywise.
Matrix SoftWeight(const Matrix &cost, const PotParams &params);

/// Sum_ij cost_ij * plan_ij * weight_ij.
double WeightedTransportValue(const Matrix &cost, const Coupling &coupling,
                              const Matrix &weight);

}  // namespace jdapot

#endif  // JDAPOT_POT_WEIGHTING_H_
