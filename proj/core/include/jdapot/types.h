// core/include/jdapot/types.h

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

#ifndef JDAPOT_TYPES_H_
#define JDAPOT_TYPES_H_

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace jdapot {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Every stochastic routine takes one of these by reference; the engine is
/// fully specified by the standard so sequences are reproducible.
using Rng = std::mt19937_64;

/// Derives an independent engine for a named stream from a user seed.
inline Rng MakeRng(std::uint64_t seed, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream & 0xffffffffu),
                    static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

}  // namespace jdapot

#endif  // JDAPOT_TYPES_H_
