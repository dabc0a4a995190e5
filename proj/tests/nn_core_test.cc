// tests/nn_core_test.cc

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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pxv/error.h"
#include "pxv/kernels.h"
#include "pxv/kernels_serial.h"
#include "test_util.h"

namespace pxv {
namespace {

using testing::max_fd_error;
using testing::random_matrix;
using testing::random_vector;

Matrix uniform_matrix(std::size_t r, std::size_t c, Rng& rng) {
  Matrix m(r, c);
  for (double& v : m.values()) v = rng.uniform(-1.0, 1.0);
  return m;
}

// Scalar probe <W, f(x)> used to turn a matrix-valued op into a loss.
double probe(const Matrix& out, const Matrix& weights) {
  return std::inner_product(out.values().begin(), out.values().end(),
                            weights.values().begin(), 0.0);
}

// Naive oracle, independent of both kernel implementations.
Matrix matmul_oracle(const Matrix& x, const AffineParams& p) {
  Matrix y(x.rows(), p.out_dim());
  for (std::size_t t = 0; t < x.rows(); ++t)
    for (std::size_t o = 0; o < p.out_dim(); ++o) {
      double s = p.bias[o];
      for (std::size_t i = 0; i < x.cols(); ++i) s += p.weight(o, i) * x(t, i);
      y(t, o) = s;
    }
  return y;
}

void expect_near_matrix(const Matrix& a, const Matrix& b, double tol) {
  ASSERT_EQ(a.rows(), b.rows());
  ASSERT_EQ(a.cols(), b.cols());
  for (std::size_t i = 0; i < a.size(); ++i)
    EXPECT_NEAR(a.data()[i], b.data()[i], tol * std::max(1.0, std::abs(b.data()[i])));
}

// --- affine ---------------------------------------------------------------

TEST(Affine, IdentityWeights) {
  const AffineParams p{identity(2), {0, 0}};
  EXPECT_EQ(affine_forward(Matrix{{1, 0}}, p), (Matrix{{1, 0}}));
}

TEST(Affine, HandArithmetic) {
  const AffineParams p{Matrix{{1, 1}, {0, 1}}, {1, 0}};
  EXPECT_EQ(affine_forward(Matrix{{1, 2}}, p), (Matrix{{4, 2}}));
}

TEST(Affine, MatchesNaiveOracle) {
  Rng rng(1);
  const Matrix x = random_matrix(3, 4, rng);
  const AffineParams p{random_matrix(5, 4, rng), random_vector(5, rng)};
  expect_near_matrix(affine_forward(x, p), matmul_oracle(x, p), 1e-14);
}

TEST(Affine, ShapeMismatchThrows) {
  const AffineParams p{Matrix(2, 3), {0, 0}};
  EXPECT_THROW(affine_forward(Matrix(1, 2), p), ShapeError);
  EXPECT_THROW(affine_backward(Matrix(1, 3), p, Matrix(1, 3)), ShapeError);
}

TEST(Affine, ZeroUpstreamGivesZeroGradients) {
  Rng rng(2);
  const Matrix x = random_matrix(3, 4, rng);
  const AffineParams p{random_matrix(2, 4, rng), random_vector(2, rng)};
  const GradPair g = affine_backward(x, p, Matrix(3, 2));
  for (double v : g.wrt_input.values()) EXPECT_EQ(v, 0.0);
  for (double v : g.wrt_params->weight.values()) EXPECT_EQ(v, 0.0);
  for (double v : g.wrt_params->bias) EXPECT_EQ(v, 0.0);
}

TEST(Affine, ScalarProductRule) {
  const AffineParams p{Matrix{{3}}, {0}};
  const GradPair g = affine_backward(Matrix{{2}}, p, Matrix{{1}});
  EXPECT_EQ(g.wrt_params->weight, (Matrix{{2}}));
  EXPECT_EQ(g.wrt_input, (Matrix{{3}}));
  EXPECT_EQ(g.wrt_params->bias, (Vector{1}));
}

TEST(Affine, GradientMatchesFiniteDifferences) {
  Rng rng(3);
  Matrix x = uniform_matrix(3, 4, rng);
  AffineParams p{uniform_matrix(5, 4, rng), random_vector(5, rng, 0.5)};
  const Matrix w = uniform_matrix(3, 5, rng);
  const auto f = [&] { return probe(affine_forward(x, p), w); };
  const GradPair g = affine_backward(x, p, w);
  EXPECT_LT(max_fd_error(f, x.values(), g.wrt_input.values()), 1e-4);
  EXPECT_LT(max_fd_error(f, p.weight.values(), g.wrt_params->weight.values()), 1e-4);
  EXPECT_LT(max_fd_error(f, p.bias, g.wrt_params->bias), 1e-4);
}

TEST(Affine, LinearWithoutBias) {
  Rng rng(4);
  const Matrix x = random_matrix(4, 6, rng);
  const AffineParams p{random_matrix(3, 6, rng), Vector(3, 0.0)};
  const double alpha = -2.75;
  Matrix ax = x;
  for (double& v : ax.values()) v *= alpha;
  Matrix expect = affine_forward(x, p);
  for (double& v : expect.values()) v *= alpha;
  expect_near_matrix(affine_forward(ax, p), expect, 1e-12);
}

// --- relu -----------------------------------------------------------------

TEST(Relu, Forward) { EXPECT_EQ(relu_forward(Matrix{{-1, 2}}), (Matrix{{0, 2}})); }

TEST(Relu, AllNegative) {
  const Matrix x{{-1, -2}, {-0.5, -3}};
  EXPECT_EQ(relu_forward(x), Matrix(2, 2));
  EXPECT_EQ(relu_backward(x, Matrix(2, 2, 1.0)), Matrix(2, 2));
}

TEST(Relu, GradientMatchesFiniteDifferencesAwayFromKink) {
  Rng rng(5);
  Matrix x = uniform_matrix(6, 5, rng);
  for (double& v : x.values())
    if (std::abs(v) < 1e-3) v = 0.5;
  const Matrix w = uniform_matrix(6, 5, rng);
  const auto f = [&] { return probe(relu_forward(x), w); };
  EXPECT_LT(max_fd_error(f, x.values(), relu_backward(x, w).values()), 1e-4);
}

// --- splice ---------------------------------------------------------------

TEST(Splice, ZeroOffsetIsIdentity) {
  Rng rng(6);
  const Matrix x = random_matrix(7, 3, rng);
  const int zero[] = {0};
  EXPECT_EQ(splice(x, zero), x);
}

TEST(Splice, SingleFrameClamps) {
  const Matrix x{{1, 2}};
  const int offs[] = {-2, 0, 2};
  EXPECT_EQ(splice(x, offs), (Matrix{{1, 2, 1, 2, 1, 2}}));
}

TEST(Splice, Definition) {
  const Matrix x{{0}, {1}, {2}, {3}, {4}};
  const int offs[] = {-1, 0, 1};
  const Matrix s = splice(x, offs);
  EXPECT_EQ(s(2, 0), 1);
  EXPECT_EQ(s(2, 1), 2);
  EXPECT_EQ(s(2, 2), 3);
  EXPECT_EQ(s(0, 0), 0);  // clamped
  EXPECT_EQ(s(4, 2), 4);  // clamped
}

TEST(Splice, BadOffsetsThrow) {
  const Matrix x(3, 2);
  EXPECT_THROW(splice(x, std::span<const int>()), ArgumentError);
  const int unsorted[] = {1, 0};
  EXPECT_THROW(splice(x, unsorted), ArgumentError);
}

TEST(Splice, BackwardIsAdjoint) {
  Rng rng(7);
  const int offs[] = {-3, 0, 3};
  for (std::size_t T : {1u, 2u, 5u, 11u}) {
    const Matrix x = random_matrix(T, 4, rng);
    const Matrix y = random_matrix(T, 12, rng);
    const double lhs = probe(splice(x, offs), y);
    const double rhs = probe(x, splice_backward(y, offs, T));
    EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(lhs)));
  }
}

TEST(Splice, GradientMatchesFiniteDifferences) {
  Rng rng(8);
  Matrix x = uniform_matrix(6, 3, rng);
  const int offs[] = {-2, -1, 0, 1, 2};
  const Matrix w = uniform_matrix(6, 15, rng);
  const auto f = [&] { return probe(splice(x, offs), w); };
  EXPECT_LT(max_fd_error(f, x.values(), splice_backward(w, offs, 6).values()), 1e-4);
}

// --- stats pooling --------------------------------------------------------

TEST(StatsPool, ConstantRowsHitVarianceFloor) {
  const Vector s = stats_pool(Matrix{{2.5, -1}, {2.5, -1}});
  EXPECT_EQ(s[0], 2.5);
  EXPECT_EQ(s[1], -1);
  EXPECT_NEAR(s[2], std::sqrt(kStatsVarianceFloor), 1e-20);
  EXPECT_NEAR(s[3], 1e-5, 1e-20);
}

TEST(StatsPool, HandValues) {
  const Vector s = stats_pool(Matrix{{1, 2}, {3, 4}});
  EXPECT_EQ(s, (Vector{2, 3, 1, 1}));
}

TEST(StatsPool, GradientMatchesFiniteDifferences) {
  Rng rng(9);
  Matrix x = uniform_matrix(7, 3, rng);
  const Vector w = random_vector(6, rng);
  const auto f = [&] {
    const Vector s = stats_pool(x);
    return std::inner_product(s.begin(), s.end(), w.begin(), 0.0);
  };
  EXPECT_LT(max_fd_error(f, x.values(), stats_pool_backward(x, w).values()), 1e-4);
}

TEST(StatsPool, PermutationInvariant) {
  Rng rng(10);
  const Matrix x = random_matrix(9, 4, rng);
  std::vector<std::size_t> perm(9);
  std::iota(perm.begin(), perm.end(), 0);
  for (int trial = 0; trial < 5; ++trial) {
    for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.uniform_int(i)]);
    Matrix y(9, 4);
    for (std::size_t t = 0; t < 9; ++t)
      std::copy(x.row(perm[t]).begin(), x.row(perm[t]).end(), y.row(t).begin());
    const Vector a = stats_pool(x), b = stats_pool(y);
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-12);
  }
}

TEST(StatsPool, DuplicationInvariant) {
  Rng rng(11);
  const Matrix x = random_matrix(8, 3, rng);
  Matrix xx(16, 3);
  for (std::size_t t = 0; t < 16; ++t)
    std::copy(x.row(t % 8).begin(), x.row(t % 8).end(), xx.row(t).begin());
  const Vector a = stats_pool(x), b = stats_pool(xx);
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-10);
}

// --- concat ---------------------------------------------------------------

TEST(Concat, Basic) { EXPECT_EQ(concat_cols(Matrix{{1}}, Matrix{{2}}), (Matrix{{1, 2}})); }

TEST(Concat, EmptyRightOperand) {
  const Matrix a{{1, 2}, {3, 4}};
  EXPECT_EQ(concat_cols(a, Matrix(2, 0)), a);
}

TEST(Concat, RowMismatchThrows) {
  EXPECT_THROW(concat_cols(Matrix(2, 1), Matrix(3, 1)), ShapeError);
}

TEST(Concat, SplitRecoversBlocks) {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t T = 1 + rng.uniform_int(5);
    const Matrix a = random_matrix(T, rng.uniform_int(4), rng);
    const Matrix b = random_matrix(T, rng.uniform_int(4), rng);
    auto [ga, gb] = split_cols(concat_cols(a, b), a.cols());
    EXPECT_EQ(ga, a);
    EXPECT_EQ(gb, b);
  }
}

// --- softmax cross-entropy ------------------------------------------------

TEST(SoftmaxXent, UniformLogits) {
  const Vector logits(4, 0.3);
  EXPECT_NEAR(softmax_xent(logits, 2).loss, std::log(4.0), 1e-15);
}

TEST(SoftmaxXent, LargeLogitsAreStable) {
  const Vector logits{1000, 0};
  const XentResult r = softmax_xent(logits, 0);
  EXPECT_TRUE(std::isfinite(r.loss));
  EXPECT_NEAR(r.loss, 0.0, 1e-300);
  EXPECT_TRUE(all_finite(r.grad));
}

TEST(SoftmaxXent, LabelOutOfRangeThrows) {
  EXPECT_THROW(softmax_xent(Vector{0, 1}, 2), ArgumentError);
}

TEST(SoftmaxXent, GradientMatchesFiniteDifferences) {
  Rng rng(13);
  Vector logits = random_vector(6, rng, 2.0);
  const XentResult r = softmax_xent(logits, 4);
  const auto f = [&] { return softmax_xent(logits, 4).loss; };
  EXPECT_LT(max_fd_error(f, logits, r.grad), 1e-4);
}

TEST(SoftmaxXent, LossNonNegativeAndGradSumsToZero) {
  Rng rng(14);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t K = 2 + rng.uniform_int(10);
    const Vector logits = random_vector(K, rng, 5.0);
    const XentResult r = softmax_xent(logits, rng.uniform_int(K));
    EXPECT_GE(r.loss, 0.0);
    EXPECT_NEAR(std::accumulate(r.grad.begin(), r.grad.end(), 0.0), 0.0, 1e-12);
  }
}

TEST(Softmax, RowsSumToOne) {
  Rng rng(15);
  const Matrix p = softmax_rows(random_matrix(5, 7, rng, 3.0));
  for (std::size_t t = 0; t < 5; ++t) {
    const auto r = p.row(t);
    EXPECT_NEAR(std::accumulate(r.begin(), r.end(), 0.0), 1.0, 1e-12);
  }
}

// --- parallel kernels against the serial reference ------------------------

class ParallelVsSerial : public ::testing::TestWithParam<std::size_t> {};

TEST_P(ParallelVsSerial, KernelsAgree) {
  const std::size_t T = GetParam();
  Rng rng(100 + T);
  const Matrix x = random_matrix(T, 40, rng);
  const AffineParams p{random_matrix(64, 40, rng), random_vector(64, rng)};
  const Matrix up = random_matrix(T, 64, rng);
  expect_near_matrix(affine_forward(x, p), serial::affine_forward(x, p), 1e-12);
  const GradPair a = affine_backward(x, p, up), b = serial::affine_backward(x, p, up);
  expect_near_matrix(a.wrt_input, b.wrt_input, 1e-12);
  expect_near_matrix(a.wrt_params->weight, b.wrt_params->weight, 1e-12);
  for (std::size_t i = 0; i < a.wrt_params->bias.size(); ++i)
    EXPECT_NEAR(a.wrt_params->bias[i], b.wrt_params->bias[i], 1e-12 * T);

  const int offs[] = {-2, 0, 2};
  EXPECT_EQ(splice(x, offs), serial::splice(x, offs));
  const Matrix sup = random_matrix(T, 120, rng);
  expect_near_matrix(splice_backward(sup, offs, T), serial::splice_backward(sup, offs, T),
                     1e-13);
  EXPECT_EQ(relu_forward(x), serial::relu_forward(x));
  EXPECT_EQ(relu_backward(x, x), serial::relu_backward(x, x));

  const Vector s = stats_pool(x), ss = serial::stats_pool(x);
  for (std::size_t k = 0; k < s.size(); ++k) EXPECT_NEAR(s[k], ss[k], 1e-12);
  const Vector w = random_vector(80, rng);
  expect_near_matrix(stats_pool_backward(x, w), serial::stats_pool_backward(x, w), 1e-12);
}

INSTANTIATE_TEST_SUITE_P(Sizes, ParallelVsSerial, ::testing::Values(1, 3, 17, 300, 1200));

}  // namespace
}  // namespace pxv
