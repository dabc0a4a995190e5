// src/kernels_serial.cc

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

#include "pxv/kernels_serial.h"

#include <algorithm>
#include <cmath>

#include "shape_checks.h"

namespace pxv::serial {

Matrix affine_forward(const Matrix& x, const AffineParams& p) {
  internal::check_affine(x, p);
  Matrix y(x.rows(), p.out_dim());
  for (std::size_t t = 0; t < x.rows(); ++t)
    for (std::size_t o = 0; o < p.out_dim(); ++o) {
      double s = p.bias[o];
      for (std::size_t i = 0; i < p.in_dim(); ++i) s += p.weight(o, i) * x(t, i);
      y(t, o) = s;
    }
  return y;
}

GradPair affine_backward(const Matrix& x, const AffineParams& p,
                         const Matrix& upstream, bool need_input_grad) {
  internal::check_affine_upstream(x, p, upstream);
  const std::size_t in = p.in_dim(), out = p.out_dim();
  AffineParams dp{Matrix(out, in), Vector(out, 0.0)};
  for (std::size_t o = 0; o < out; ++o)
    for (std::size_t i = 0; i < in; ++i) {
      double s = 0.0;
      for (std::size_t t = 0; t < x.rows(); ++t) s += upstream(t, o) * x(t, i);
      dp.weight(o, i) = s;
    }
  for (std::size_t o = 0; o < out; ++o) {
    double s = 0.0;
    for (std::size_t t = 0; t < x.rows(); ++t) s += upstream(t, o);
    dp.bias[o] = s;
  }
  GradPair g;
  g.wrt_params = std::move(dp);
  if (need_input_grad) {
    g.wrt_input = Matrix(x.rows(), in);
    for (std::size_t t = 0; t < x.rows(); ++t)
      for (std::size_t i = 0; i < in; ++i) {
        double s = 0.0;
        for (std::size_t o = 0; o < out; ++o) s += upstream(t, o) * p.weight(o, i);
        g.wrt_input(t, i) = s;
      }
  }
  return g;
}

Matrix relu_forward(const Matrix& x) {
  Matrix y(x.rows(), x.cols());
  for (std::size_t t = 0; t < x.rows(); ++t)
    for (std::size_t d = 0; d < x.cols(); ++d) y(t, d) = std::max(0.0, x(t, d));
  return y;
}

Matrix relu_backward(const Matrix& input, const Matrix& upstream) {
  internal::check_same_shape(input, upstream, "relu backward");
  Matrix g(input.rows(), input.cols());
  for (std::size_t t = 0; t < input.rows(); ++t)
    for (std::size_t d = 0; d < input.cols(); ++d)
      g(t, d) = input(t, d) > 0.0 ? upstream(t, d) : 0.0;
  return g;
}

Matrix splice(const Matrix& frames, std::span<const int> offsets) {
  check_offsets(offsets);
  internal::check_nonempty_rows(frames, "splice");
  const std::size_t T = frames.rows(), D = frames.cols();
  Matrix out(T, D * offsets.size());
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t k = 0; k < offsets.size(); ++k) {
      const std::size_t src =
          internal::clamp_index(static_cast<long>(t) + offsets[k], T);
      for (std::size_t d = 0; d < D; ++d) out(t, k * D + d) = frames(src, d);
    }
  return out;
}

Matrix splice_backward(const Matrix& upstream, std::span<const int> offsets,
                       std::size_t frames) {
  check_offsets(offsets);
  const std::size_t K = offsets.size();
  if (frames == 0 || upstream.rows() != frames || upstream.cols() % K != 0)
    throw ShapeError("splice backward: shape mismatch");
  const std::size_t D = upstream.cols() / K;
  Matrix grad(frames, D);
  for (std::size_t t = 0; t < frames; ++t)
    for (std::size_t k = 0; k < K; ++k) {
      const std::size_t dst =
          internal::clamp_index(static_cast<long>(t) + offsets[k], frames);
      for (std::size_t d = 0; d < D; ++d) grad(dst, d) += upstream(t, k * D + d);
    }
  return grad;
}

Vector stats_pool(const Matrix& f) {
  internal::check_nonempty_rows(f, "stats_pool");
  const std::size_t T = f.rows(), D = f.cols();
  Vector out(2 * D);
  for (std::size_t d = 0; d < D; ++d) {
    double sum = 0.0;
    for (std::size_t t = 0; t < T; ++t) sum += f(t, d);
    const double mean = sum / static_cast<double>(T);
    double ss = 0.0;
    for (std::size_t t = 0; t < T; ++t) ss += (f(t, d) - mean) * (f(t, d) - mean);
    out[d] = mean;
    out[D + d] = std::sqrt(std::max(ss / static_cast<double>(T), kStatsVarianceFloor));
  }
  return out;
}

Matrix stats_pool_backward(const Matrix& f, std::span<const double> upstream) {
  internal::check_nonempty_rows(f, "stats_pool backward");
  const std::size_t T = f.rows(), D = f.cols();
  if (upstream.size() != 2 * D) throw ShapeError("stats_pool backward: shape mismatch");
  const Vector pooled = serial::stats_pool(f);
  const double n = static_cast<double>(T);
  Matrix grad(T, D);
  for (std::size_t d = 0; d < D; ++d) {
    const double mean = pooled[d], sd = pooled[D + d];
    const bool floored = sd * sd <= kStatsVarianceFloor;
    for (std::size_t t = 0; t < T; ++t) {
      double g = upstream[d] / n;
      if (!floored) g += upstream[D + d] * (f(t, d) - mean) / (n * sd);
      grad(t, d) = g;
    }
  }
  return grad;
}

}  // namespace pxv::serial
