// core/src/pca.cc

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

#include "jdapot/pca.h"

#include <string>

#include "jdapot/errors.h"

namespace jdapot {

Matrix PcaProjection::Apply(const Matrix &points) const {
  if (points.cols() != mean.size()) throw DimensionError("PCA input dimension mismatch");
  return (points.rowwise() - mean.transpose()) * components;
}

PcaProjection FitPca(const Matrix &points, int n_components) {
  if (points.rows() < 2) throw InvalidArgument("PCA needs at least two points");
  if (n_components < 1 || n_components > points.cols())
    throw InvalidArgument("PCA component count " + std::to_string(n_components) +
                          " outside [1, " + std::to_string(points.cols()) + "]");
  PcaProjection pca;
  pca.mean = points.colwise().mean().transpose();
  const Matrix centered = points.rowwise() - pca.mean.transpose();
  const Matrix cov = centered.transpose() * centered / static_cast<double>(points.rows() - 1);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  if (eig.info() != Eigen::Success) throw NumericError("PCA eigen-decomposition failed");

  // Eigenvalues come back in increasing order.
  const Eigen::Index dim = points.cols();
  pca.components.resize(dim, n_components);
  pca.explained.resize(n_components);
  for (int c = 0; c < n_components; c++) {
    Vector v = eig.eigenvectors().col(dim - 1 - c);
    Eigen::Index arg;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
    pca.components.col(c) = v;
    pca.explained(c) = eig.eigenvalues()(dim - 1 - c);
  }
  return pca;
}

}  // namespace jdapot
