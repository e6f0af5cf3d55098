// core/src/matrix_io.cc

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

#include "jdapot/matrix_io.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "jdapot/errors.h"

namespace jdapot {

void SaveMatrixCsv(const Matrix &m, const std::string &path) {
  std::FILE *fp = std::fopen(path.c_str(), "w");
  if (fp == nullptr) throw IoError("cannot open " + path + " for writing");
  for (Eigen::Index r = 0; r < m.rows(); r++) {
    for (Eigen::Index c = 0; c < m.cols(); c++)
      std::fprintf(fp, c == 0 ? "%.17g" : ",%.17g", m(r, c));
    std::fputc('\n', fp);
  }
  bool bad = std::ferror(fp) != 0;
  if (std::fclose(fp) != 0 || bad) throw IoError("error writing " + path);
}

Matrix LoadMatrixCsv(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    line_no++;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    std::vector<double> row;
    double v;
    while (fields >> v) row.push_back(v);
    if (!fields.eof() || row.empty()) throw ParseError(path, line_no, "non-numeric field");
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError(path, line_no, "ragged row");
    rows.push_back(std::move(row));
  }
  Matrix m(static_cast<Eigen::Index>(rows.size()),
           rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); r++)
    for (std::size_t c = 0; c < rows[r].size(); c++)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return m;
}

}  // namespace jdapot
