// core/include/jdapot/pca.h

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

#ifndef JDAPOT_PCA_H_
#define JDAPOT_PCA_H_

#include "jdapot/types.h"

namespace jdapot {

struct PcaProjection {
  Vector mean;          // dim
  Matrix components;    // dim x n_components, unit columns, by decreasing variance
  Vector explained;     // eigenvalues of the sample covariance

  Matrix Apply(const Matrix &points) const;
};

/// Principal axes of the rows of `points`.  Each component's sign is fixed
/// so that its largest-magnitude coordinate is positive, making the result
/// deterministic.
PcaProjection FitPca(const Matrix &points, int n_components = 2);

}  // namespace jdapot

#endif  // JDAPOT_PCA_H_
