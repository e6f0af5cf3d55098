// core/include/jdapot/ot_solver.h

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

#ifndef JDAPOT_OT_SOLVER_H_
#define JDAPOT_OT_SOLVER_H_

#include <vector>

#include "jdapot/types.h"

namespace jdapot {

/// Added under the square root of Euclidean distances so the gradient exists
/// at coincident points.
inline constexpr double kDistanceStab = 1e-12;

enum class CostMetric { kEuclidean, kSquaredEuclidean };

/// Transport plan between a source (rows) and target (columns) distribution.
struct Coupling {
  Matrix plan;
  Vector row_marginal;
  Vector col_marginal;
  /// Solver diagnostics.  marginal_error is the largest absolute deviation of
  /// any row or column sum from its prescribed marginal.
  int iterations = 0;
  double marginal_error = 0.0;
  bool converged = true;

  double TotalMass() const { return plan.sum(); }
};

struct SinkhornOptions {
  double epsilon = 0.1;
  int max_iter = 1000;
  double tol = 1e-6;
};

/// Throws InvalidArgument unless every entry is finite and >= 0.
void CheckCostMatrix(const Matrix &cost);

/// Entry (i, j) is the distance between row i of `zs` and row j of `zt`.
/// kEuclidean evaluates sqrt(|d|^2 + kDistanceStab).
Matrix PairwiseFeatureCost(const Matrix &zs, const Matrix &zt,
                           CostMetric metric = CostMetric::kEuclidean);

Vector UniformMarginal(Eigen::Index n);

/// Entropic OT by log-domain Sinkhorn scaling.  Iterates until the largest
/// marginal violation drops below `tol` or `max_iter` sweeps are done; in the
/// latter case the result is returned with converged == false rather than
/// thrown.  Throws InvalidArgument for non-probability marginals, a bad cost
/// matrix or epsilon <= 0.
Coupling Sinkhorn(const Matrix &cost, const Vector &mu, const Vector &nu,
                  const SinkhornOptions &opts);

/// Sum_ij cost_ij * plan_ij.
double TransportValue(const Matrix &cost, const Coupling &coupling);
double TransportValue(const Matrix &cost, const Matrix &plan);

struct ExactOtResult {
  Coupling coupling;
  double value = 0.0;
  std::vector<int> permutation;  // row i is matched to column permutation[i]
};

/// Exact OT between two uniform distributions of equal size n <= 8, by
/// enumerating all n! scaled permutation matrices (the vertices of the
/// Birkhoff polytope).  Ties go to the lexicographically smallest permutation.
ExactOtResult ExactOtOracle(const Matrix &cost);

}  // namespace jdapot

#endif  // JDAPOT_OT_SOLVER_H_
