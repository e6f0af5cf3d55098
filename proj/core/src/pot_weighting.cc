// core/src/pot_weighting.cc

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

#include "jdapot/pot_weighting.h"

#include <cmath>

#include "jdapot/errors.h"

namespace jdapot {

void PotParams::Check() const {
  if (!std::isfinite(cost_threshold))
    throw InvalidArgument("POT cost threshold must be finite");
  if (!(scale >= 0.0) || !std::isfinite(scale))
    throw InvalidArgument("POT scale must be finite and >= 0");
}

double Logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

Matrix HardWeight(const Matrix &cost, const PotParams &params) {
  CheckCostMatrix(cost);
  params.Check();
  return (cost.array() <= params.cost_threshold).cast<double>().matrix();
}

Matrix SoftWeight(const Matrix &cost, const PotParams &params) {
  CheckCostMatrix(cost);
  params.Check();
  return cost.unaryExpr([&](double c) {
    return Logistic(-params.scale * (c - params.cost_threshold));
  });
}

double WeightedTransportValue(const Matrix &cost, const Coupling &coupling,
                              const Matrix &weight) {
  const Matrix &plan = coupling.plan;
  if (cost.rows() != plan.rows() || cost.cols() != plan.cols() ||
      weight.rows() != plan.rows() || weight.cols() != plan.cols())
    throw DimensionError("cost, plan and weight shapes differ");
  return cost.cwiseProduct(plan).cwiseProduct(weight).sum();
}

}  // namespace jdapot
