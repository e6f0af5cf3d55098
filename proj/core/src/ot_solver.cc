// core/src/ot_solver.cc

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

#include "jdapot/ot_solver.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "jdapot/errors.h"

namespace jdapot {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void CheckMarginal(const Vector &p, Eigen::Index expected, const char *name) {
  if (p.size() != expected)
    throw DimensionError(std::string(name) + " has length " +
                         std::to_string(p.size()) + ", expected " +
                         std::to_string(expected));
  double sum = 0.0;
  for (Eigen::Index i = 0; i < p.size(); i++) {
    if (!std::isfinite(p(i)) || p(i) < 0.0)
      throw InvalidArgument(std::string(name) + " has a negative or non-finite entry");
    sum += p(i);
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw InvalidArgument(std::string(name) + " does not sum to 1");
}

// log(sum_k exp(x_k)), tolerant of -inf entries.
template <typename Expr>
double LogSumExp(const Expr &x) {
  double m = x.maxCoeff();
  if (m == kNegInf) return kNegInf;
  return m + std::log((x.array() - m).exp().sum());
}

}  // namespace

void CheckCostMatrix(const Matrix &cost) {
  if (cost.rows() < 1 || cost.cols() < 1)
    throw DimensionError("cost matrix is empty");
  if (!cost.allFinite()) throw InvalidArgument("cost matrix has non-finite entries");
  if (cost.minCoeff() < 0.0) throw InvalidArgument("cost matrix has negative entries");
}

Matrix PairwiseFeatureCost(const Matrix &zs, const Matrix &zt, CostMetric metric) {
  if (zs.cols() != zt.cols())
    throw DimensionError("feature dimension mismatch: " +
                         std::to_string(zs.cols()) + " vs " +
                         std::to_string(zt.cols()));
  Matrix cost(zs.rows(), zt.rows());
  for (Eigen::Index i = 0; i < zs.rows(); i++) {
    for (Eigen::Index j = 0; j < zt.rows(); j++) {
      double sq = (zs.row(i) - zt.row(j)).squaredNorm();
      cost(i, j) = metric == CostMetric::kEuclidean ? std::sqrt(sq + kDistanceStab)
                                                    : sq;
    }
  }
  return cost;
}

Vector UniformMarginal(Eigen::Index n) {
  return Vector::Constant(n, 1.0 / static_cast<double>(n));
}

Coupling Sinkhorn(const Matrix &cost, const Vector &mu, const Vector &nu,
                  const SinkhornOptions &opts) {
  CheckCostMatrix(cost);
  CheckMarginal(mu, cost.rows(), "row marginal");
  CheckMarginal(nu, cost.cols(), "column marginal");
  if (!(opts.epsilon > 0.0) || !std::isfinite(opts.epsilon))
    throw InvalidArgument("Sinkhorn epsilon must be positive");
  if (opts.max_iter < 1) throw InvalidArgument("Sinkhorn max_iter must be >= 1");
  if (!(opts.tol > 0.0)) throw InvalidArgument("Sinkhorn tol must be positive");

  const Eigen::Index n = cost.rows(), m = cost.cols();
  const double eps = opts.epsilon;
  const Matrix neg_cost = -cost / eps;
  const Vector log_mu = mu.array().log().matrix();
  const Vector log_nu = nu.array().log().matrix();

  // Scaled dual potentials: plan_ij = exp(f_i + g_j - C_ij / eps).
  Vector f = Vector::Zero(n), g = Vector::Zero(m);
  Matrix plan(n, m);
  Coupling out;
  out.converged = false;

  auto compute_plan = [&]() {
    for (Eigen::Index i = 0; i < n; i++)
      for (Eigen::Index j = 0; j < m; j++) {
        double e = f(i) + g(j) + neg_cost(i, j);
        plan(i, j) = e == kNegInf ? 0.0 : std::exp(e);
      }
  };
  auto marginal_error = [&]() {
    double row_err = (plan.rowwise().sum() - mu).cwiseAbs().maxCoeff();
    double col_err = (plan.colwise().sum().transpose() - nu).cwiseAbs().maxCoeff();
    return std::max(row_err, col_err);
  };

  int it = 0;
  double err = std::numeric_limits<double>::infinity();
  while (it < opts.max_iter) {
    it++;
    for (Eigen::Index i = 0; i < n; i++)
      f(i) = log_mu(i) == kNegInf
                 ? kNegInf
                 : log_mu(i) - LogSumExp(g.transpose() + neg_cost.row(i));
    for (Eigen::Index j = 0; j < m; j++)
      g(j) = log_nu(j) == kNegInf ? kNegInf
                                  : log_nu(j) - LogSumExp(f + neg_cost.col(j));
    compute_plan();
    err = marginal_error();
    if (!std::isfinite(err)) throw NumericError("Sinkhorn produced non-finite plan");
    if (err < opts.tol) {
      out.converged = true;
      break;
    }
  }

  out.plan = std::move(plan);
  out.row_marginal = mu;
  out.col_marginal = nu;
  out.iterations = it;
  out.marginal_error = err;
  return out;
}

double TransportValue(const Matrix &cost, const Matrix &plan) {
  if (cost.rows() != plan.rows() || cost.cols() != plan.cols())
    throw DimensionError("cost and plan shapes differ");
  return cost.cwiseProduct(plan).sum();
}

double TransportValue(const Matrix &cost, const Coupling &coupling) {
  return TransportValue(cost, coupling.plan);
}

ExactOtResult ExactOtOracle(const Matrix &cost) {
  CheckCostMatrix(cost);
  const Eigen::Index n = cost.rows();
  if (cost.cols() != n) throw DimensionError("exact OT oracle needs a square cost");
  if (n > 8) throw InvalidArgument("exact OT oracle limited to n <= 8");

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best_perm = perm;
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; i++) total += cost(i, perm[i]);
    if (total < best) {  // strict: keeps the lexicographically first minimiser
      best = total;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  ExactOtResult result;
  const double mass = 1.0 / static_cast<double>(n);
  result.coupling.plan = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; i++) result.coupling.plan(i, best_perm[i]) = mass;
  result.coupling.row_marginal = UniformMarginal(n);
  result.coupling.col_marginal = UniformMarginal(n);
  result.value = best * mass;
  result.permutation = std::move(best_perm);
  return result;
}

}  // namespace jdapot
