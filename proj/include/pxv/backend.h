// pxv/backend.h

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

// Embedding extraction and the scoring backend:
//   center -> LDA -> length normalization -> two-covariance PLDA.

#ifndef PXV_BACKEND_H_
#define PXV_BACKEND_H_

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "pxv/matrix.h"
#include "pxv/network.h"

namespace pxv {

/// Pre-activation of the first segment-level affine.
Vector extract_embedding(const NetworkParams& net, const Matrix& features);

struct LdaTransform {
  Matrix projection;  // target_dim x input_dim
  Vector mean;        // training mean, subtracted first

  std::size_t input_dim() const { return projection.cols(); }
  std::size_t output_dim() const { return projection.rows(); }
  /// projection * (x - mean), no normalization.
  Vector apply(std::span<const double> x) const;
};

/// Top generalized eigenvectors of (between-class, within-class) scatter
/// of the centered data, each row scaled to unit within-class variance and
/// signed so that its first nonzero entry is positive. target_dim is
/// clamped to min(input_dim, classes - 1) with a warning.
LdaTransform lda_train(std::span<const Vector> embeddings,
                       std::span<const std::size_t> labels,
                       std::size_t target_dim);

/// Centers, projects and scales to unit Euclidean norm. Zero vectors stay
/// zero (with a warning).
Vector preprocess(const LdaTransform& lda, std::span<const double> x);
std::vector<Vector> preprocess(const LdaTransform& lda,
                               std::span<const Vector> embeddings);

/// x = mu + u + e, u ~ N(0, between), e ~ N(0, within).
struct PldaModel {
  Vector mu;
  Matrix between;
  Matrix within;

  std::size_t dim() const { return mu.size(); }
};

/// Total marginal log-likelihood of the data under the model.
double plda_log_likelihood(const PldaModel& model, std::span<const Vector> x,
                           std::span<const std::size_t> labels);
/// One EM update of (mu, between, within).
PldaModel plda_em_step(const PldaModel& model, std::span<const Vector> x,
                       std::span<const std::size_t> labels);
/// Moment initialization followed by `iters` EM steps. `trace`, if given,
/// receives the log-likelihood after initialization and after each step.
PldaModel plda_train(std::span<const Vector> x, std::span<const std::size_t> labels,
                     std::size_t iters = 10, std::vector<double>* trace = nullptr);

/// Log-likelihood-ratio scorer. Construction diagonalizes both covariances
/// simultaneously, so each score costs O(dim).
class PldaScorer {
 public:
  explicit PldaScorer(const PldaModel& model);

  double score(std::span<const double> enroll, std::span<const double> test) const;
  std::size_t dim() const { return mu_.size(); }

 private:
  Vector mu_;
  Matrix transform_;  // T with T within T^T = I, T between T^T = diag(psi)
  Vector psi_;
};

double plda_score(const PldaModel& model, std::span<const double> enroll,
                  std::span<const double> test);

/// Mean of preprocessed embeddings, length-normalized again.
Vector enroll_speaker(std::span<const Vector> embeddings);

struct BackendModel {
  LdaTransform lda;
  PldaModel plda;
};

/// PXNM blocks "lda/projection", "lda/mean", "plda/mu", "plda/between",
/// "plda/within".
void save_backend(const BackendModel& model, const std::filesystem::path& path);
BackendModel load_backend(const std::filesystem::path& path);

}  // namespace pxv

#endif  // PXV_BACKEND_H_
