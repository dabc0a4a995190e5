// pxv/error.h

// Copyright 2026  The pxv Authors

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

#ifndef PXV_ERROR_H_
#define PXV_ERROR_H_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pxv {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand dimensions disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Dataset content violates a precondition (bad label, empty set, unknown id).
class DataError : public Error {
 public:
  using Error::Error;
};

/// A file could not be opened, created, or fully written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Degenerate input to a detection metric (e.g. no target trials).
class MetricError : public Error {
 public:
  using Error::Error;
};

/// Malformed file. `position()` is a byte offset for binary formats and a
/// 1-based line number for text formats.
class FormatError : public Error {
 public:
  enum class Unit { kByte, kLine };

  FormatError(const std::string& what, Unit unit, std::uint64_t position)
      : Error(what + (unit == Unit::kByte ? " (at byte offset "
                                          : " (at line ") +
              std::to_string(position) + ")"),
        unit_(unit),
        position_(position) {}

  Unit unit() const { return unit_; }
  std::uint64_t position() const { return position_; }

 private:
  Unit unit_;
  std::uint64_t position_;
};

}  // namespace pxv

#endif  // PXV_ERROR_H_
