// pxv/linalg.h

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

// Small dense symmetric linear algebra for the scoring backend.

#ifndef PXV_LINALG_H_
#define PXV_LINALG_H_

#include <optional>
#include <span>

#include "pxv/matrix.h"

namespace pxv {

Matrix matmul(const Matrix& a, const Matrix& b);
/// a * b^T
Matrix matmul_nt(const Matrix& a, const Matrix& b);
Vector matvec(const Matrix& a, std::span<const double> x);
Matrix add(const Matrix& a, const Matrix& b);
Matrix scaled(const Matrix& a, double s);
/// (a + a^T) / 2
Matrix symmetrize(const Matrix& a);
double trace(const Matrix& a);
void add_to_diagonal(Matrix& a, double v);
/// a += s * x x^T
void add_outer(Matrix& a, std::span<const double> x, double s = 1.0);
double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);

/// Lower-triangular L with L L^T = a, or nullopt if `a` is not
/// numerically positive definite.
std::optional<Matrix> try_cholesky(const Matrix& a);
/// Throws ArgumentError if `a` is not positive definite.
Matrix cholesky(const Matrix& a);

Matrix inverse_spd(const Matrix& a);
double log_det_spd(const Matrix& a);

struct SymEigen {
  Vector values;   // descending
  Matrix vectors;  // row i is the unit eigenvector of values[i]
};

/// Cyclic Jacobi rotations on a symmetric matrix.
SymEigen jacobi_eigen(const Matrix& a);

/// Solves a v = lambda b v for symmetric `a` and positive definite `b`.
/// Row i of `vectors` is v_i, scaled so that v_i^T b v_i = 1; values are
/// descending.
SymEigen generalized_eigen(const Matrix& a, const Matrix& b);

}  // namespace pxv

#endif  // PXV_LINALG_H_
