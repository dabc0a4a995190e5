// pxv/kernels.h

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

// Dense layer kernels with exact reverse-mode gradients.
//
// Every function here is pure. The data-parallel kernels are OpenMP
// parallelized over output rows or columns; each output element is still
// reduced in a fixed order, so results do not depend on the thread count.
// Plain loop versions of the same kernels live in kernels_serial.h and are
// used as the test oracle and the benchmark baseline.

#ifndef PXV_KERNELS_H_
#define PXV_KERNELS_H_

#include <cstddef>
#include <optional>
#include <span>
#include <utility>

#include "pxv/matrix.h"

namespace pxv {

/// weight is out x in; bias has `out` entries.
struct AffineParams {
  Matrix weight;
  Vector bias;

  std::size_t in_dim() const { return weight.cols(); }
  std::size_t out_dim() const { return weight.rows(); }
  bool operator==(const AffineParams&) const = default;
};

struct GradPair {
  Matrix wrt_input;
  std::optional<AffineParams> wrt_params;
};

/// Row t of the result is weight * x_t + bias.
Matrix affine_forward(const Matrix& x, const AffineParams& p);

/// Gradients of an affine layer given dL/d(output). With
/// `need_input_grad == false` the returned wrt_input is empty.
GradPair affine_backward(const Matrix& x, const AffineParams& p,
                         const Matrix& upstream, bool need_input_grad = true);

Matrix relu_forward(const Matrix& x);
/// Passes `upstream` where `input > 0`.
Matrix relu_backward(const Matrix& input, const Matrix& upstream);

/// TDNN context splicing. Row t is the concatenation of rows t+o for each
/// offset o, indices clamped to [0, T-1]. Offsets must be nonempty and
/// strictly increasing.
Matrix splice(const Matrix& frames, std::span<const int> offsets);
/// Adjoint of splice: scatters the blocks of `upstream` back onto the
/// `frames`-row input they were read from.
Matrix splice_backward(const Matrix& upstream, std::span<const int> offsets,
                       std::size_t frames);

constexpr double kStatsVarianceFloor = 1e-10;

/// Per-column mean followed by per-column population standard deviation
/// sqrt(max(var, kStatsVarianceFloor)).
Vector stats_pool(const Matrix& f);
Matrix stats_pool_backward(const Matrix& f, std::span<const double> upstream);

Matrix concat_cols(const Matrix& a, const Matrix& b);
/// Adjoint of concat_cols: the first `a_cols` columns and the rest.
std::pair<Matrix, Matrix> split_cols(const Matrix& m, std::size_t a_cols);

Vector softmax(std::span<const double> logits);
/// Softmax applied independently to every row.
Matrix softmax_rows(const Matrix& logits);

struct XentResult {
  double loss = 0.0;
  Vector grad;  // softmax(logits) - onehot(label)
};

XentResult softmax_xent(std::span<const double> logits, std::size_t label);

/// Validates TDNN offsets: nonempty, strictly increasing.
void check_offsets(std::span<const int> offsets);

}  // namespace pxv

#endif  // PXV_KERNELS_H_
