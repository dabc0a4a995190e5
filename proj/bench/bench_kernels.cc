// bench/bench_kernels.cc

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

// OpenMP kernels against their serial references. Arguments are the number
// of frames T and the layer width; OMP_NUM_THREADS controls the parallel side.
//
//   ./pxv_bench --benchmark_filter=Affine

#include <benchmark/benchmark.h>

#include <vector>

#include "pxv/kernels.h"
#include "pxv/kernels_serial.h"
#include "pxv/rng.h"

namespace {

using pxv::AffineParams;
using pxv::Matrix;

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  pxv::Rng rng(seed);
  Matrix m(rows, cols);
  for (double& v : m.values()) v = rng.normal();
  return m;
}

AffineParams random_affine(std::size_t in, std::size_t out) {
  AffineParams p{random_matrix(out, in, 2), pxv::Vector(out, 0.1)};
  return p;
}

const std::vector<int> kContext = {-2, -1, 0, 1, 2};

template <Matrix (*Fn)(const Matrix&, const AffineParams&)>
void BM_AffineForward(benchmark::State& state) {
  const auto T = static_cast<std::size_t>(state.range(0));
  const auto D = static_cast<std::size_t>(state.range(1));
  const Matrix x = random_matrix(T, D, 1);
  const AffineParams p = random_affine(D, D);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(x, p));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(T * D * D));
}

template <pxv::GradPair (*Fn)(const Matrix&, const AffineParams&, const Matrix&, bool)>
void BM_AffineBackward(benchmark::State& state) {
  const auto T = static_cast<std::size_t>(state.range(0));
  const auto D = static_cast<std::size_t>(state.range(1));
  const Matrix x = random_matrix(T, D, 1);
  const Matrix up = random_matrix(T, D, 3);
  const AffineParams p = random_affine(D, D);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(x, p, up, true));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(2 * T * D * D));
}

template <Matrix (*Fn)(const Matrix&, std::span<const int>)>
void BM_Splice(benchmark::State& state) {
  const Matrix x = random_matrix(static_cast<std::size_t>(state.range(0)),
                                 static_cast<std::size_t>(state.range(1)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(x, kContext));
}

template <pxv::Vector (*Fn)(const Matrix&)>
void BM_StatsPool(benchmark::State& state) {
  const Matrix x = random_matrix(static_cast<std::size_t>(state.range(0)),
                                 static_cast<std::size_t>(state.range(1)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(x));
}

void Sizes(benchmark::internal::Benchmark* b) {
  for (long t : {200, 1000}) b->Args({t, 64})->Args({t, 512});
  b->Unit(benchmark::kMicrosecond);
}

}  // namespace

BENCHMARK(BM_AffineForward<pxv::serial::affine_forward>)->Name("AffineForward/serial")->Apply(Sizes);
BENCHMARK(BM_AffineForward<pxv::affine_forward>)->Name("AffineForward/omp")->Apply(Sizes);
BENCHMARK(BM_AffineBackward<pxv::serial::affine_backward>)->Name("AffineBackward/serial")->Apply(Sizes);
BENCHMARK(BM_AffineBackward<pxv::affine_backward>)->Name("AffineBackward/omp")->Apply(Sizes);
BENCHMARK(BM_Splice<pxv::serial::splice>)->Name("Splice/serial")->Apply(Sizes);
BENCHMARK(BM_Splice<pxv::splice>)->Name("Splice/omp")->Apply(Sizes);
BENCHMARK(BM_StatsPool<pxv::serial::stats_pool>)->Name("StatsPool/serial")->Apply(Sizes);
BENCHMARK(BM_StatsPool<pxv::stats_pool>)->Name("StatsPool/omp")->Apply(Sizes);

BENCHMARK_MAIN();
