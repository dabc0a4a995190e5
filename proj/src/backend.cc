// src/backend.cc

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

#include "pxv/backend.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "pxv/error.h"
#include "pxv/linalg.h"
#include "pxv/log.h"
#include "pxv/model_io.h"

namespace pxv {
namespace {

// Examples grouped by class label, in ascending label order.
struct Classes {
  std::size_t dim = 0;
  std::vector<std::vector<std::size_t>> members;
};

Classes group(std::span<const Vector> x, std::span<const std::size_t> labels,
              const char* what) {
  if (x.size() != labels.size())
    throw ShapeError(std::string(what) + ": " + std::to_string(x.size()) +
                     " vectors but " + std::to_string(labels.size()) + " labels");
  if (x.empty()) throw DataError(std::string(what) + ": no training vectors");
  Classes c;
  c.dim = x.front().size();
  if (c.dim == 0) throw ShapeError(std::string(what) + ": zero-dimensional vectors");
  std::map<std::size_t, std::size_t> index;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].size() != c.dim)
      throw ShapeError(std::string(what) + ": vector " + std::to_string(i) +
                       " has dimension " + std::to_string(x[i].size()) +
                       ", expected " + std::to_string(c.dim));
    if (!all_finite(x[i]))
      throw DataError(std::string(what) + ": vector " + std::to_string(i) +
                      " is not finite");
    index.emplace(labels[i], 0);
  }
  std::size_t k = 0;
  for (auto& [label, slot] : index) slot = k++;
  c.members.resize(k);
  for (std::size_t i = 0; i < x.size(); ++i) c.members[index[labels[i]]].push_back(i);
  return c;
}

Vector mean_of(std::span<const Vector> x, std::span<const std::size_t> idx,
               std::size_t dim) {
  Vector m(dim, 0.0);
  for (std::size_t i : idx)
    for (std::size_t d = 0; d < dim; ++d) m[d] += x[i][d];
  for (double& v : m) v /= static_cast<double>(idx.size());
  return m;
}

Vector diff(std::span<const double> a, std::span<const double> b) {
  Vector d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

// Adds increasing multiples of the mean diagonal until `m` is positive
// definite.
Matrix diagonal_load(Matrix m, double reference_trace, const std::string& what) {
  if (try_cholesky(m)) return m;
  const double n = static_cast<double>(m.rows());
  double scale = std::max(trace(m), reference_trace) / n;
  if (!(scale > 0.0)) scale = 1.0;
  double load = 1e-6 * scale;
  for (int attempt = 0; attempt < 12; ++attempt, load *= 10.0) {
    Matrix loaded = m;
    add_to_diagonal(loaded, load);
    if (try_cholesky(loaded)) {
      log::warn(what + " is singular; added " + std::to_string(load) +
                " to the diagonal");
      return loaded;
    }
  }
  throw DataError(what + " cannot be regularized to positive definite");
}

void normalize_in_place(Vector& v) {
  const double n = norm(v);
  if (n == 0.0) {
    log::warn("length normalization of a zero vector; left as zero");
    return;
  }
  for (double& x : v) x /= n;
}

// Terms of log N(xbar; mu, between + within / n), shared by equal-size classes.
struct SizeTerms {
  Matrix precision;  // (between + within / n)^-1
  double log_det = 0.0;
};

}  // namespace

Vector extract_embedding(const NetworkParams& net, const Matrix& features) {
  return embedding_preactivation(net, features);
}

Vector LdaTransform::apply(std::span<const double> x) const {
  if (x.size() != input_dim())
    throw ShapeError("LDA: input has dimension " + std::to_string(x.size()) +
                     ", transform expects " + std::to_string(input_dim()));
  return matvec(projection, diff(x, mean));
}

LdaTransform lda_train(std::span<const Vector> embeddings,
                       std::span<const std::size_t> labels, std::size_t target_dim) {
  const Classes classes = group(embeddings, labels, "LDA");
  const std::size_t D = classes.dim;
  const std::size_t C = classes.members.size();
  if (C < 2) throw DataError("LDA: at least 2 classes required, got " + std::to_string(C));
  if (target_dim == 0) throw ArgumentError("LDA: target dimension must be >= 1");
  const std::size_t limit = std::min(D, C - 1);
  if (target_dim > limit) {
    log::warn("LDA: target dimension " + std::to_string(target_dim) +
              " clamped to " + std::to_string(limit));
    target_dim = limit;
  }

  std::vector<std::size_t> all(embeddings.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const Vector mean = mean_of(embeddings, all, D);
  const double N = static_cast<double>(embeddings.size());

  Matrix between(D, D), within(D, D), total(D, D);
  for (const auto& idx : classes.members) {
    const Vector mc = mean_of(embeddings, idx, D);
    add_outer(between, diff(mc, mean), static_cast<double>(idx.size()) / N);
    for (std::size_t i : idx) {
      add_outer(within, diff(embeddings[i], mc), 1.0 / N);
      add_outer(total, diff(embeddings[i], mean), 1.0 / N);
    }
  }
  within = diagonal_load(symmetrize(within), trace(total), "LDA within-class scatter");
  const SymEigen eig = generalized_eigen(symmetrize(between), within);

  LdaTransform lda{Matrix(target_dim, D), mean};
  for (std::size_t r = 0; r < target_dim; ++r) {
    auto src = eig.vectors.row(r);
    double biggest = 0.0;
    for (double v : src) biggest = std::max(biggest, std::abs(v));
    double sign = 1.0;
    for (double v : src)
      if (std::abs(v) > 1e-12 * biggest) {
        sign = v < 0 ? -1.0 : 1.0;
        break;
      }
    for (std::size_t d = 0; d < D; ++d) lda.projection(r, d) = sign * src[d];
  }
  return lda;
}

Vector preprocess(const LdaTransform& lda, std::span<const double> x) {
  Vector y = lda.apply(x);
  normalize_in_place(y);
  return y;
}

std::vector<Vector> preprocess(const LdaTransform& lda,
                               std::span<const Vector> embeddings) {
  std::vector<Vector> out;
  out.reserve(embeddings.size());
  for (const auto& e : embeddings) out.push_back(preprocess(lda, e));
  return out;
}

double plda_log_likelihood(const PldaModel& model, std::span<const Vector> x,
                           std::span<const std::size_t> labels) {
  const Classes classes = group(x, labels, "PLDA");
  const std::size_t d = classes.dim;
  if (model.dim() != d) throw ShapeError("PLDA: model and data dimensions differ");
  const double log2pi = std::log(2.0 * std::numbers::pi);
  const Matrix w_inv = inverse_spd(model.within);
  const double w_logdet = log_det_spd(model.within);

  std::map<std::size_t, SizeTerms> by_size;
  double ll = 0.0;
  for (const auto& idx : classes.members) {
    const std::size_t n = idx.size();
    const double nd = static_cast<double>(n);
    auto it = by_size.find(n);
    if (it == by_size.end()) {
      const Matrix cov = add(model.between, scaled(model.within, 1.0 / nd));
      it = by_size.emplace(n, SizeTerms{inverse_spd(cov), log_det_spd(cov)}).first;
    }
    const Vector xbar = mean_of(x, idx, d);
    double within_quad = 0.0;
    for (std::size_t i : idx) {
      const Vector r = diff(x[i], xbar);
      within_quad += dot(r, matvec(w_inv, r));
    }
    const Vector c = diff(xbar, model.mu);
    ll += -0.5 * (nd - 1.0) * (static_cast<double>(d) * log2pi + w_logdet) -
          0.5 * within_quad -
          0.5 * (static_cast<double>(d) * log2pi + it->second.log_det +
                 dot(c, matvec(it->second.precision, c))) -
          0.5 * static_cast<double>(d) * std::log(nd);
  }
  return ll;
}

PldaModel plda_em_step(const PldaModel& model, std::span<const Vector> x,
                       std::span<const std::size_t> labels) {
  const Classes classes = group(x, labels, "PLDA");
  const std::size_t d = classes.dim;
  if (model.dim() != d) throw ShapeError("PLDA: model and data dimensions differ");
  const Matrix w_inv = inverse_spd(model.within);
  const Matrix b_inv = inverse_spd(model.between);
  const Vector b_inv_mu = matvec(b_inv, model.mu);

  // Posterior covariance of the class variable depends only on class size.
  std::map<std::size_t, Matrix> post_cov;
  const double K = static_cast<double>(classes.members.size());
  const double N = static_cast<double>(x.size());

  Vector mu_acc(d, 0.0);
  Matrix yy_acc(d, d);    // sum_i E[y y^T]
  Matrix w_acc(d, d);     // sum_ij E[(x - y)(x - y)^T]
  for (const auto& idx : classes.members) {
    const std::size_t n = idx.size();
    auto it = post_cov.find(n);
    if (it == post_cov.end())
      it = post_cov.emplace(n, inverse_spd(add(b_inv, scaled(w_inv, static_cast<double>(n)))))
               .first;
    const Matrix& C = it->second;
    Vector s(d, 0.0);
    for (std::size_t i : idx)
      for (std::size_t k = 0; k < d; ++k) s[k] += x[i][k];
    Vector rhs = matvec(w_inv, s);
    for (std::size_t k = 0; k < d; ++k) rhs[k] += b_inv_mu[k];
    const Vector m = matvec(C, rhs);

    for (std::size_t k = 0; k < d; ++k) mu_acc[k] += m[k];
    Matrix yy = C;
    add_outer(yy, m);
    yy_acc = add(yy_acc, yy);
    for (std::size_t i : idx) add_outer(w_acc, diff(x[i], m));
    w_acc = add(w_acc, scaled(C, static_cast<double>(n)));
  }

  PldaModel next;
  next.mu = mu_acc;
  for (double& v : next.mu) v /= K;
  Matrix between = scaled(yy_acc, 1.0 / K);
  add_outer(between, next.mu, -1.0);
  next.between = symmetrize(between);
  next.within = symmetrize(scaled(w_acc, 1.0 / N));
  const double ref = trace(next.between) + trace(next.within);
  next.between = diagonal_load(next.between, ref, "PLDA between-class covariance");
  next.within = diagonal_load(next.within, ref, "PLDA within-class covariance");
  return next;
}

PldaModel plda_train(std::span<const Vector> x, std::span<const std::size_t> labels,
                     std::size_t iters, std::vector<double>* trace_out) {
  const Classes classes = group(x, labels, "PLDA");
  const std::size_t d = classes.dim;
  if (classes.members.size() < 2)
    throw DataError("PLDA: at least 2 classes required");

  std::vector<std::size_t> all(x.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  PldaModel model;
  model.mu = mean_of(x, all, d);
  const double K = static_cast<double>(classes.members.size());
  const double N = static_cast<double>(x.size());
  Matrix between(d, d), within(d, d), total(d, d);
  for (const auto& idx : classes.members) {
    const Vector mc = mean_of(x, idx, d);
    add_outer(between, diff(mc, model.mu), 1.0 / K);
    for (std::size_t i : idx) {
      add_outer(within, diff(x[i], mc), 1.0 / N);
      add_outer(total, diff(x[i], model.mu), 1.0 / N);
    }
  }
  const double ref = trace(total);
  model.between = diagonal_load(symmetrize(between), ref, "PLDA between-class covariance");
  if (!try_cholesky(within)) {
    // No (or too little) within-class evidence: start from half the total
    // covariance and let EM sort out the split.
    within = add(scaled(within, 0.5), scaled(total, 0.5));
  }
  model.within = diagonal_load(symmetrize(within), ref, "PLDA within-class covariance");

  if (trace_out) trace_out->assign(1, plda_log_likelihood(model, x, labels));
  for (std::size_t it = 0; it < iters; ++it) {
    model = plda_em_step(model, x, labels);
    if (trace_out) trace_out->push_back(plda_log_likelihood(model, x, labels));
  }
  return model;
}

PldaScorer::PldaScorer(const PldaModel& model) : mu_(model.mu) {
  const std::size_t d = model.dim();
  if (model.between.rows() != d || model.between.cols() != d ||
      model.within.rows() != d || model.within.cols() != d)
    throw ShapeError("PLDA scorer: covariance shapes do not match mu");
  if (!try_cholesky(model.within))
    throw DataError("PLDA scorer: within-class covariance is not positive definite");
  SymEigen eig = generalized_eigen(symmetrize(model.between), symmetrize(model.within));
  transform_ = std::move(eig.vectors);
  psi_ = std::move(eig.values);
  for (double& p : psi_) p = std::max(p, 0.0);
}

double PldaScorer::score(std::span<const double> enroll,
                         std::span<const double> test) const {
  const std::size_t d = dim();
  if (enroll.size() != d || test.size() != d)
    throw ShapeError("PLDA score: inputs have dimensions " + std::to_string(enroll.size()) +
                     " and " + std::to_string(test.size()) + ", model has " +
                     std::to_string(d));
  const Vector ec = diff(enroll, mu_), tc = diff(test, mu_);
  double llr = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double u = dot(transform_.row(k), ec);
    const double v = dot(transform_.row(k), tc);
    const double p = psi_[k];
    const double sq = u * u + v * v;
    llr += -0.5 * std::log(2.0 * p + 1.0) + std::log(p + 1.0) -
           0.5 * ((p + 1.0) * sq - 2.0 * p * (u * v)) / (2.0 * p + 1.0) +
           0.5 * sq / (p + 1.0);
  }
  return llr;
}

double plda_score(const PldaModel& model, std::span<const double> enroll,
                  std::span<const double> test) {
  return PldaScorer(model).score(enroll, test);
}

Vector enroll_speaker(std::span<const Vector> embeddings) {
  if (embeddings.empty()) throw ArgumentError("enrollment needs at least one embedding");
  const std::size_t d = embeddings.front().size();
  Vector m(d, 0.0);
  for (const auto& e : embeddings) {
    if (e.size() != d) throw ShapeError("enrollment embeddings differ in dimension");
    for (std::size_t k = 0; k < d; ++k) m[k] += e[k];
  }
  for (double& v : m) v /= static_cast<double>(embeddings.size());
  normalize_in_place(m);
  return m;
}

void save_backend(const BackendModel& model, const std::filesystem::path& path) {
  const auto row = [](const Vector& v) { return Matrix::from_rows(1, v.size(), v); };
  const BlockList blocks = {
      {"lda/projection", model.lda.projection},
      {"lda/mean", row(model.lda.mean)},
      {"plda/mu", row(model.plda.mu)},
      {"plda/between", model.plda.between},
      {"plda/within", model.plda.within},
  };
  write_blocks(blocks, path);
}

BackendModel load_backend(const std::filesystem::path& path) {
  const BlockList blocks = read_blocks(path);
  const auto vec = [&](const char* name) {
    const Matrix& m = find_block(blocks, name);
    if (m.rows() != 1) throw DataError(std::string("backend model: ") + name + " must be one row");
    return Vector(m.values().begin(), m.values().end());
  };
  BackendModel model;
  model.lda.projection = find_block(blocks, "lda/projection");
  model.lda.mean = vec("lda/mean");
  model.plda.mu = vec("plda/mu");
  model.plda.between = find_block(blocks, "plda/between");
  model.plda.within = find_block(blocks, "plda/within");
  const std::size_t k = model.lda.projection.rows();
  if (model.lda.mean.size() != model.lda.projection.cols() || model.plda.mu.size() != k ||
      model.plda.between.rows() != k || model.plda.between.cols() != k ||
      model.plda.within.rows() != k || model.plda.within.cols() != k)
    throw DataError("backend model " + path.string() + ": inconsistent block shapes");
  return model;
}

}  // namespace pxv
