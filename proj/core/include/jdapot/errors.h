// core/include/jdapot/errors.h

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

#ifndef JDAPOT_ERRORS_H_
#define JDAPOT_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace jdapot {

/// Base class for every error raised by the library.  Callers that only care
/// about "something went wrong" catch this; the CLI maps the subclasses onto
/// distinct exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed file content.  Carries the 1-based line number of the offence.
class ParseError : public Error {
 public:
  ParseError(const std::string &path, std::size_t line, const std::string &what)
      : Error(path + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Shapes or dimensions of the operands do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An argument violates a documented precondition (range, sign, etc.).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A numeric procedure produced non-finite values or could not proceed.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace jdapot

#endif  // JDAPOT_ERRORS_H_
