// src/metrics.cc

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

#include "pxv/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <utility>

#include "pxv/error.h"

namespace pxv {
namespace {

void require_both(std::size_t targets, std::size_t nontargets) {
  if (targets == 0) throw MetricError("no target trials");
  if (nontargets == 0) throw MetricError("no nontarget trials");
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::vector<double> ScoreSet::targets() const {
  std::vector<double> out;
  for (const auto& r : records)
    if (r.target) out.push_back(r.score);
  return out;
}

std::vector<double> ScoreSet::nontargets() const {
  std::vector<double> out;
  for (const auto& r : records)
    if (!r.target) out.push_back(r.score);
  return out;
}

ScoreSet join_scores(std::span<const Trial> trials, std::span<const Score> scores) {
  std::map<std::pair<std::string, std::string>, double> by_pair;
  for (const auto& s : scores)
    if (!by_pair.emplace(std::pair(s.enroll, s.test), s.score).second)
      throw DataError("duplicate score for trial " + s.enroll + " " + s.test);
  ScoreSet set;
  set.records.reserve(trials.size());
  for (const auto& t : trials) {
    auto it = by_pair.find({t.enroll, t.test});
    if (it == by_pair.end()) throw DataError("no score for trial " + t.enroll + " " + t.test);
    set.records.push_back({t.enroll, t.test, it->second, t.target});
  }
  return set;
}

void DcfParams::validate() const {
  if (!(c_miss > 0.0) || !(c_fa > 0.0))
    throw ConfigError("DCF costs must be positive");
  if (!(p_target > 0.0 && p_target < 1.0))
    throw ConfigError("DCF target prior must lie in (0, 1)");
}

std::vector<DetPoint> det_points(std::span<const double> targets,
                                 std::span<const double> nontargets) {
  require_both(targets.size(), nontargets.size());
  std::vector<double> tar(targets.begin(), targets.end());
  std::vector<double> non(nontargets.begin(), nontargets.end());
  for (double s : tar)
    if (std::isnan(s)) throw MetricError("NaN score");
  for (double s : non)
    if (std::isnan(s)) throw MetricError("NaN score");
  std::sort(tar.begin(), tar.end());
  std::sort(non.begin(), non.end());
  const double nt = static_cast<double>(tar.size());
  const double nn = static_cast<double>(non.size());

  std::vector<DetPoint> points;
  points.push_back({0.0, 1.0});
  // Merge the two sorted lists; after consuming every score <= s the counts
  // give the operating point for threshold s.
  std::size_t i = 0, j = 0;
  while (i < tar.size() || j < non.size()) {
    const double s = (j == non.size() || (i < tar.size() && tar[i] <= non[j])) ? tar[i] : non[j];
    while (i < tar.size() && tar[i] <= s) ++i;
    while (j < non.size() && non[j] <= s) ++j;
    points.push_back({static_cast<double>(i) / nt,
                      static_cast<double>(non.size() - j) / nn});
  }
  return points;
}

std::vector<DetPoint> det_points(const ScoreSet& scores) {
  return det_points(scores.targets(), scores.nontargets());
}

double eer_from_points(std::span<const DetPoint> points) {
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (points[k].p_miss < points[k].p_fa) continue;
    if (k == 0) return points[0].p_miss;
    const DetPoint a = points[k - 1], b = points[k];
    const double gap_a = a.p_fa - a.p_miss;  // > 0
    const double gap_b = b.p_miss - b.p_fa;  // >= 0
    const double alpha = gap_a / (gap_a + gap_b);
    return a.p_miss + alpha * (b.p_miss - a.p_miss);
  }
  throw MetricError("operating points never cross");
}

double compute_eer(std::span<const double> targets, std::span<const double> nontargets) {
  return eer_from_points(det_points(targets, nontargets));
}

double compute_eer(const ScoreSet& scores) {
  return compute_eer(scores.targets(), scores.nontargets());
}

double compute_min_dcf(std::span<const double> targets,
                       std::span<const double> nontargets, const DcfParams& params) {
  params.validate();
  const auto points = det_points(targets, nontargets);
  const double w_miss = params.c_miss * params.p_target;
  const double w_fa = params.c_fa * (1.0 - params.p_target);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : points) best = std::min(best, w_miss * p.p_miss + w_fa * p.p_fa);
  return best / std::min(w_miss, w_fa);
}

double compute_min_dcf(const ScoreSet& scores, const DcfParams& params) {
  return compute_min_dcf(scores.targets(), scores.nontargets(), params);
}

ScoreSet score_all_trials(const PldaScorer& scorer, const EmbeddingTable& enrollments,
                          const EmbeddingTable& tests, std::span<const Trial> trials) {
  const std::size_t n = trials.size();
  std::vector<const Vector*> e(n), t(n);
  for (std::size_t i = 0; i < n; ++i) {
    e[i] = enrollments.find(trials[i].enroll);
    if (!e[i]) throw DataError("unknown enrollment id " + trials[i].enroll);
    t[i] = tests.find(trials[i].test);
    if (!t[i]) throw DataError("unknown test id " + trials[i].test);
  }
  ScoreSet set;
  set.records.resize(n);
  const long count = static_cast<long>(n);
#pragma omp parallel for schedule(static) if (count > 256)
  for (long i = 0; i < count; ++i) {
    const auto& trial = trials[i];
    set.records[i] = {trial.enroll, trial.test, scorer.score(*e[i], *t[i]), trial.target};
  }
  return set;
}

MetricsReport evaluate(const ScoreSet& scores, const DcfParams& dcf08,
                       const DcfParams& dcf10) {
  const auto tar = scores.targets();
  const auto non = scores.nontargets();
  return {compute_eer(tar, non), compute_min_dcf(tar, non, dcf08),
          compute_min_dcf(tar, non, dcf10)};
}

std::string format_report(const MetricsReport& report) {
  return "EER " + fixed6(report.eer) + "\n" + "EER_percent " + fixed6(100.0 * report.eer) +
         "\n" + "minDCF08 " + fixed6(report.min_dcf08) + "\n" + "minDCF10 " +
         fixed6(report.min_dcf10) + "\n";
}

void write_det_csv(std::span<const DetPoint> points, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::trunc | std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << "p_miss,p_fa\n";
  char buf[96];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p.p_miss, p.p_fa);
    os << buf;
  }
  os.close();
  if (!os) throw IoError("failed writing " + path.string());
}

}  // namespace pxv
