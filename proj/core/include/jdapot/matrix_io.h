// core/include/jdapot/matrix_io.h

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

#ifndef JDAPOT_MATRIX_IO_H_
#define JDAPOT_MATRIX_IO_H_

#include <string>

#include "jdapot/types.h"

namespace jdapot {

/// Plain CSV, one matrix row per line, no header, 17 significant digits.
void SaveMatrixCsv(const Matrix &m, const std::string &path);
Matrix LoadMatrixCsv(const std::string &path);

}  // namespace jdapot

#endif  // JDAPOT_MATRIX_IO_H_
