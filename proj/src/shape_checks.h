// src/shape_checks.h

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

#ifndef PXV_SRC_SHAPE_CHECKS_H_
#define PXV_SRC_SHAPE_CHECKS_H_

#include <cstddef>
#include <string>

#include "pxv/error.h"
#include "pxv/kernels.h"

namespace pxv::internal {

inline std::string dims(std::size_t r, std::size_t c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

inline void check_affine(const Matrix& x, const AffineParams& p) {
  if (p.bias.size() != p.weight.rows())
    throw ShapeError("affine: bias has " + std::to_string(p.bias.size()) +
                     " entries, weight is " +
                     dims(p.weight.rows(), p.weight.cols()));
  if (x.cols() != p.weight.cols())
    throw ShapeError("affine: input is " + dims(x.rows(), x.cols()) +
                     ", weight is " + dims(p.weight.rows(), p.weight.cols()));
}

inline void check_affine_upstream(const Matrix& x, const AffineParams& p,
                                  const Matrix& upstream) {
  check_affine(x, p);
  if (upstream.rows() != x.rows() || upstream.cols() != p.weight.rows())
    throw ShapeError("affine backward: upstream is " +
                     dims(upstream.rows(), upstream.cols()) + ", expected " +
                     dims(x.rows(), p.weight.rows()));
}

inline void check_same_shape(const Matrix& a, const Matrix& b,
                             const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError(std::string(what) + ": " + dims(a.rows(), a.cols()) +
                     " vs " + dims(b.rows(), b.cols()));
}

inline void check_nonempty_rows(const Matrix& m, const char* what) {
  if (m.rows() == 0) throw ShapeError(std::string(what) + ": no frames");
}

inline std::size_t clamp_index(long t, std::size_t frames) {
  if (t < 0) return 0;
  if (t >= static_cast<long>(frames)) return frames - 1;
  return static_cast<std::size_t>(t);
}

}  // namespace pxv::internal

#endif  // PXV_SRC_SHAPE_CHECKS_H_
