// src/kernels.cc

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

#include "pxv/kernels.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "shape_checks.h"

namespace pxv {
namespace {

// Below this many multiply-adds a kernel runs on the calling thread.
constexpr long kParallelWork = 1L << 15;

// Four independent partial sums; the combination order is fixed.
inline double dot(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace

void check_offsets(std::span<const int> offsets) {
  if (offsets.empty()) throw ArgumentError("splice: empty offset list");
  for (std::size_t k = 1; k < offsets.size(); ++k)
    if (offsets[k] <= offsets[k - 1])
      throw ArgumentError("splice: offsets must be strictly increasing");
}

Matrix affine_forward(const Matrix& x, const AffineParams& p) {
  internal::check_affine(x, p);
  const long rows = static_cast<long>(x.rows());
  const std::size_t in = p.in_dim(), out = p.out_dim();
  Matrix y(x.rows(), out);
  const long work = rows * static_cast<long>(in * out);
#pragma omp parallel for schedule(static) if (work > kParallelWork)
  for (long t = 0; t < rows; ++t) {
    const double* xt = x.data() + t * in;
    double* yt = y.data() + t * out;
    for (std::size_t o = 0; o < out; ++o)
      yt[o] = dot(xt, p.weight.data() + o * in, in) + p.bias[o];
  }
  return y;
}

GradPair affine_backward(const Matrix& x, const AffineParams& p,
                         const Matrix& upstream, bool need_input_grad) {
  internal::check_affine_upstream(x, p, upstream);
  const long rows = static_cast<long>(x.rows());
  const std::size_t in = p.in_dim(), out = p.out_dim();
  const long work = rows * static_cast<long>(in * out);

  GradPair g;
  AffineParams dp{Matrix(out, in), Vector(out, 0.0)};
  const long outl = static_cast<long>(out);
#pragma omp parallel for schedule(static) if (work > kParallelWork)
  for (long o = 0; o < outl; ++o) {
    double* dw = dp.weight.data() + o * in;
    double db = 0.0;
    for (long t = 0; t < rows; ++t) {
      const double go = upstream(t, o);
      db += go;
      if (go != 0.0) axpy(go, x.data() + t * in, dw, in);
    }
    dp.bias[o] = db;
  }
  g.wrt_params = std::move(dp);

  if (need_input_grad) {
    g.wrt_input = Matrix(x.rows(), in);
#pragma omp parallel for schedule(static) if (work > kParallelWork)
    for (long t = 0; t < rows; ++t) {
      double* dx = g.wrt_input.data() + t * in;
      const double* gt = upstream.data() + t * out;
      for (std::size_t o = 0; o < out; ++o)
        if (gt[o] != 0.0) axpy(gt[o], p.weight.data() + o * in, dx, in);
    }
  }
  return g;
}

Matrix relu_forward(const Matrix& x) {
  Matrix y = x;
  for (double& v : y.values()) v = v > 0.0 ? v : 0.0;
  return y;
}

Matrix relu_backward(const Matrix& input, const Matrix& upstream) {
  internal::check_same_shape(input, upstream, "relu backward");
  Matrix g(upstream.rows(), upstream.cols());
  const auto in = input.values();
  const auto up = upstream.values();
  auto out = g.values();
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = in[i] > 0.0 ? up[i] : 0.0;
  return g;
}

Matrix splice(const Matrix& frames, std::span<const int> offsets) {
  check_offsets(offsets);
  internal::check_nonempty_rows(frames, "splice");
  const std::size_t T = frames.rows(), D = frames.cols(), K = offsets.size();
  Matrix out(T, D * K);
  const long rows = static_cast<long>(T);
#pragma omp parallel for schedule(static) if (rows * long(D * K) > kParallelWork)
  for (long t = 0; t < rows; ++t) {
    double* dst = out.data() + t * D * K;
    for (std::size_t k = 0; k < K; ++k) {
      const std::size_t src = internal::clamp_index(t + offsets[k], T);
      std::copy_n(frames.data() + src * D, D, dst + k * D);
    }
  }
  return out;
}

Matrix splice_backward(const Matrix& upstream, std::span<const int> offsets,
                       std::size_t frames) {
  check_offsets(offsets);
  const std::size_t K = offsets.size();
  if (frames == 0 || upstream.rows() != frames || upstream.cols() % K != 0)
    throw ShapeError("splice backward: upstream is " +
                     internal::dims(upstream.rows(), upstream.cols()) +
                     " for " + std::to_string(frames) + " frames and " +
                     std::to_string(K) + " offsets");
  const std::size_t D = upstream.cols() / K;
  const long T = static_cast<long>(frames);
  const long lo_off = offsets.front(), hi_off = offsets.back();
  Matrix grad(frames, D);
  // Gather form of the scatter: input row s collects every (t, k) whose
  // clamped source is s, visited in increasing (t, k) order.
#pragma omp parallel for schedule(static) if (T * long(D * K) > kParallelWork)
  for (long s = 0; s < T; ++s) {
    const long t_lo = s == 0 ? 0 : std::max(0L, s - hi_off);
    const long t_hi = s == T - 1 ? T - 1 : std::min(T - 1, s - lo_off);
    double* dst = grad.data() + s * D;
    for (long t = t_lo; t <= t_hi; ++t)
      for (std::size_t k = 0; k < K; ++k)
        if (static_cast<long>(internal::clamp_index(t + offsets[k], frames)) == s)
          axpy(1.0, upstream.data() + (t * K + k) * D, dst, D);
  }
  return grad;
}

Vector stats_pool(const Matrix& f) {
  internal::check_nonempty_rows(f, "stats_pool");
  const std::size_t T = f.rows(), D = f.cols();
  Vector out(2 * D, 0.0);
  double* mean = out.data();
  double* sd = out.data() + D;
  for (std::size_t t = 0; t < T; ++t) axpy(1.0, f.data() + t * D, mean, D);
  const double inv_t = 1.0 / static_cast<double>(T);
  for (std::size_t d = 0; d < D; ++d) mean[d] *= inv_t;
  for (std::size_t t = 0; t < T; ++t) {
    const double* row = f.data() + t * D;
    for (std::size_t d = 0; d < D; ++d) {
      const double c = row[d] - mean[d];
      sd[d] += c * c;
    }
  }
  for (std::size_t d = 0; d < D; ++d)
    sd[d] = std::sqrt(std::max(sd[d] * inv_t, kStatsVarianceFloor));
  return out;
}

Matrix stats_pool_backward(const Matrix& f, std::span<const double> upstream) {
  internal::check_nonempty_rows(f, "stats_pool backward");
  const std::size_t T = f.rows(), D = f.cols();
  if (upstream.size() != 2 * D)
    throw ShapeError("stats_pool backward: upstream has " +
                     std::to_string(upstream.size()) + " entries, expected " +
                     std::to_string(2 * D));
  const Vector pooled = stats_pool(f);
  const double inv_t = 1.0 / static_cast<double>(T);
  // d sd / d f(t,d) = (f(t,d) - mean_d) / (T sd_d) unless the floor is active.
  Vector mean_coef(D), sd_coef(D);
  for (std::size_t d = 0; d < D; ++d) {
    const double sd = pooled[D + d];
    const bool floored = sd * sd <= kStatsVarianceFloor;
    mean_coef[d] = upstream[d] * inv_t;
    sd_coef[d] = floored ? 0.0 : upstream[D + d] * inv_t / sd;
  }
  Matrix grad(T, D);
  const long rows = static_cast<long>(T);
#pragma omp parallel for schedule(static) if (rows * long(D) > kParallelWork)
  for (long t = 0; t < rows; ++t) {
    const double* row = f.data() + t * D;
    double* g = grad.data() + t * D;
    for (std::size_t d = 0; d < D; ++d)
      g[d] = mean_coef[d] + sd_coef[d] * (row[d] - pooled[d]);
  }
  return grad;
}

Matrix concat_cols(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows())
    throw ShapeError("concat_cols: row counts " + std::to_string(a.rows()) +
                     " and " + std::to_string(b.rows()));
  Matrix out(a.rows(), a.cols() + b.cols());
  for (std::size_t t = 0; t < a.rows(); ++t) {
    std::copy_n(a.data() + t * a.cols(), a.cols(), out.data() + t * out.cols());
    std::copy_n(b.data() + t * b.cols(), b.cols(),
                out.data() + t * out.cols() + a.cols());
  }
  return out;
}

std::pair<Matrix, Matrix> split_cols(const Matrix& m, std::size_t a_cols) {
  if (a_cols > m.cols())
    throw ShapeError("split_cols: split point " + std::to_string(a_cols) +
                     " beyond " + std::to_string(m.cols()) + " columns");
  const std::size_t b_cols = m.cols() - a_cols;
  Matrix a(m.rows(), a_cols), b(m.rows(), b_cols);
  for (std::size_t t = 0; t < m.rows(); ++t) {
    std::copy_n(m.data() + t * m.cols(), a_cols, a.data() + t * a_cols);
    std::copy_n(m.data() + t * m.cols() + a_cols, b_cols, b.data() + t * b_cols);
  }
  return {std::move(a), std::move(b)};
}

Vector softmax(std::span<const double> logits) {
  if (logits.empty()) throw ShapeError("softmax: empty logits");
  const double mx = *std::max_element(logits.begin(), logits.end());
  Vector p(logits.size());
  double z = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    p[k] = std::exp(logits[k] - mx);
    z += p[k];
  }
  for (double& v : p) v /= z;
  return p;
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (std::size_t t = 0; t < logits.rows(); ++t) {
    const Vector p = softmax(logits.row(t));
    std::copy(p.begin(), p.end(), out.row(t).begin());
  }
  return out;
}

XentResult softmax_xent(std::span<const double> logits, std::size_t label) {
  if (label >= logits.size())
    throw ArgumentError("softmax_xent: label " + std::to_string(label) +
                        " out of range for " + std::to_string(logits.size()) +
                        " classes");
  const double mx = *std::max_element(logits.begin(), logits.end());
  XentResult r;
  r.grad.resize(logits.size());
  double z = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    r.grad[k] = std::exp(logits[k] - mx);
    z += r.grad[k];
  }
  r.loss = std::log(z) - (logits[label] - mx);
  for (double& v : r.grad) v /= z;
  r.grad[label] -= 1.0;
  return r;
}

}  // namespace pxv
