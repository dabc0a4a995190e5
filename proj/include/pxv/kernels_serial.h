// pxv/kernels_serial.h

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

// Straight-loop reference versions of the data-parallel kernels. Same
// contracts as kernels.h; no OpenMP, no unrolling.

#ifndef PXV_KERNELS_SERIAL_H_
#define PXV_KERNELS_SERIAL_H_

#include "pxv/kernels.h"

namespace pxv::serial {

Matrix affine_forward(const Matrix& x, const AffineParams& p);
GradPair affine_backward(const Matrix& x, const AffineParams& p,
                         const Matrix& upstream, bool need_input_grad = true);
Matrix relu_forward(const Matrix& x);
Matrix relu_backward(const Matrix& input, const Matrix& upstream);
Matrix splice(const Matrix& frames, std::span<const int> offsets);
Matrix splice_backward(const Matrix& upstream, std::span<const int> offsets,
                       std::size_t frames);
Vector stats_pool(const Matrix& f);
Matrix stats_pool_backward(const Matrix& f, std::span<const double> upstream);

}  // namespace pxv::serial

#endif  // PXV_KERNELS_SERIAL_H_
