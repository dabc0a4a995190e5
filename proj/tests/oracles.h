// tests/oracles.h

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

// Reference implementations shared by the unit tests and the acceptance
// binary.  None of these call into the code they check, beyond building
// inputs.

#ifndef PXV_TESTS_ORACLES_H_
#define PXV_TESTS_ORACLES_H_

#include <algorithm>
#include <cstdint>
#include <limits>
#include <set>
#include <vector>

#include "pxv/backend.h"
#include "pxv/linalg.h"
#include "pxv/metrics.h"
#include "pxv/network.h"
#include "pxv/rng.h"
#include "test_util.h"

namespace pxv::testing {

// --- detection metrics ------------------------------------------------------

struct Sweep {
  std::vector<double> p_miss, p_fa;
};

// Error rates at -inf and at every distinct score, accepting score > t.
inline Sweep brute_force_sweep(const std::vector<double>& tar, const std::vector<double>& non) {
  std::set<double> thresholds(tar.begin(), tar.end());
  thresholds.insert(non.begin(), non.end());
  std::vector<double> th = {-std::numeric_limits<double>::infinity()};
  th.insert(th.end(), thresholds.begin(), thresholds.end());
  Sweep s;
  for (double t : th) {
    std::size_t miss = 0, fa = 0;
    for (double x : tar) miss += !(x > t);
    for (double x : non) fa += x > t;
    s.p_miss.push_back(static_cast<double>(miss) / static_cast<double>(tar.size()));
    s.p_fa.push_back(static_cast<double>(fa) / static_cast<double>(non.size()));
  }
  return s;
}

// Linear interpolation between the last sweep point with p_miss < p_fa and
// the first with p_miss >= p_fa.
inline double oracle_eer(const std::vector<double>& tar, const std::vector<double>& non) {
  const Sweep s = brute_force_sweep(tar, non);
  for (std::size_t k = 0; k < s.p_miss.size(); ++k) {
    if (s.p_miss[k] < s.p_fa[k]) continue;
    if (k == 0) return s.p_miss[0];
    const double ga = s.p_fa[k - 1] - s.p_miss[k - 1];
    const double gb = s.p_miss[k] - s.p_fa[k];
    return s.p_miss[k - 1] + ga / (ga + gb) * (s.p_miss[k] - s.p_miss[k - 1]);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

inline double oracle_min_dcf(const std::vector<double>& tar, const std::vector<double>& non,
                             const DcfParams& p) {
  const Sweep s = brute_force_sweep(tar, non);
  const double wm = p.c_miss * p.p_target, wf = p.c_fa * (1.0 - p.p_target);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < s.p_miss.size(); ++k)
    best = std::min(best, wm * s.p_miss[k] + wf * s.p_fa[k]);
  return best / std::min(wm, wf);
}

// Scores on a coarse grid so that ties are frequent.
inline void random_trial_set(Rng& rng, std::size_t max_trials, std::vector<double>& tar,
                             std::vector<double>& non) {
  const std::size_t n = 2 + rng.uniform_int(max_trials - 1);
  const std::size_t nt = 1 + rng.uniform_int(n - 1);
  tar.clear();
  non.clear();
  for (std::size_t i = 0; i < n; ++i) {
    const double s = static_cast<double>(static_cast<int>(rng.uniform_int(11)) - 5);
    (i < nt ? tar : non).push_back(s + (i < nt ? 1.0 : 0.0));
  }
}

// --- PLDA -------------------------------------------------------------------

// Samples from x = mu + u + e with u ~ N(0, B), e ~ N(0, W).
struct Labeled {
  std::vector<Vector> x;
  std::vector<std::size_t> labels;
};

inline Labeled sample_plda(const PldaModel& m, std::span<const std::size_t> sizes, Rng& rng) {
  const std::size_t d = m.dim();
  const Matrix lb = cholesky(m.between), lw = cholesky(m.within);
  Labeled out;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    const Vector u = matvec(lb, random_vector(d, rng));
    for (std::size_t i = 0; i < sizes[k]; ++i) {
      const Vector e = matvec(lw, random_vector(d, rng));
      Vector x(d);
      for (std::size_t j = 0; j < d; ++j) x[j] = m.mu[j] + u[j] + e[j];
      out.x.push_back(std::move(x));
      out.labels.push_back(k);
    }
  }
  return out;
}

// --- network gradients ------------------------------------------------------

// Zero biases put a unit exactly on the ReLU kink whenever all of its inputs
// are dead, where the one-sided difference quotients disagree.
inline NetworkParams jitter_biases(NetworkParams net, std::uint64_t seed) {
  Rng rng(seed);
  for (auto& b : blocks(net))
    if (b.name.ends_with(".bias"))
      for (double& v : b.values) v = 0.1 * rng.normal();
  return net;
}

inline double speaker_fd_error(const NetworkParams& net0, const Matrix& feats, std::size_t spk) {
  NetworkParams net = jitter_biases(net0, 99);
  NetworkParams grad = zeros_like(net);
  speaker_loss_gradient(net, feats, spk, grad);
  auto p = blocks(net);
  const auto g = blocks(std::as_const(grad));
  const auto f = [&] { return speaker_loss(net, feats, spk); };
  double worst = 0.0;
  for (std::size_t b = 0; b < p.size(); ++b)
    worst = std::max(worst, max_fd_error(f, p[b].values, g[b].values));
  return worst;
}

inline double phonetic_fd_error(const NetworkParams& net0, const Matrix& feats, std::size_t c,
                                std::size_t senone) {
  NetworkParams net = jitter_biases(net0, 98);
  NetworkParams grad = zeros_like(net);
  phonetic_loss_gradient(net, feats, c, senone, grad);
  auto p = blocks(net);
  const auto g = blocks(std::as_const(grad));
  const auto f = [&] { return phonetic_loss(net, feats, c, senone); };
  double worst = 0.0;
  for (std::size_t b = 0; b < p.size(); ++b)
    worst = std::max(worst, max_fd_error(f, p[b].values, g[b].values));
  return worst;
}

}  // namespace pxv::testing

#endif  // PXV_TESTS_ORACLES_H_
