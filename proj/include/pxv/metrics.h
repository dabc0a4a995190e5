// pxv/metrics.h

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

// Trial scoring and detection metrics.
//
// A trial is accepted when its score is strictly greater than the
// threshold. The sweep visits a threshold below every score, then every
// distinct score in increasing order; the last point rejects everything.

#ifndef PXV_METRICS_H_
#define PXV_METRICS_H_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pxv/backend.h"
#include "pxv/text_io.h"

namespace pxv {

struct ScoreRecord {
  std::string enroll;
  std::string test;
  double score = 0.0;
  bool target = false;

  bool operator==(const ScoreRecord&) const = default;
};

struct ScoreSet {
  std::vector<ScoreRecord> records;

  /// Scores of the target (resp. nontarget) trials, in record order.
  std::vector<double> targets() const;
  std::vector<double> nontargets() const;
};

/// Joins a score file with its trial list. Every trial must have exactly
/// one score line with the same (enroll, test) pair; order follows `trials`.
ScoreSet join_scores(std::span<const Trial> trials, std::span<const Score> scores);

struct DcfParams {
  double c_miss = 1.0;
  double c_fa = 1.0;
  double p_target = 0.01;

  void validate() const;
};

inline constexpr DcfParams kDcf08{10.0, 1.0, 0.01};
inline constexpr DcfParams kDcf10{1.0, 1.0, 0.001};

struct DetPoint {
  double p_miss = 0.0;
  double p_fa = 0.0;

  bool operator==(const DetPoint&) const = default;
};

/// Operating points over the threshold sweep; p_miss is non-decreasing and
/// p_fa non-increasing. Throws MetricError without both trial classes.
std::vector<DetPoint> det_points(std::span<const double> targets,
                                 std::span<const double> nontargets);
std::vector<DetPoint> det_points(const ScoreSet& scores);

/// Linear interpolation between the last point with p_miss < p_fa and the
/// first point with p_miss >= p_fa.
double eer_from_points(std::span<const DetPoint> points);
double compute_eer(std::span<const double> targets, std::span<const double> nontargets);
double compute_eer(const ScoreSet& scores);

/// min over the sweep of c_miss p P_miss + c_fa (1 - p) P_fa, divided by
/// min(c_miss p, c_fa (1 - p)).
double compute_min_dcf(std::span<const double> targets,
                       std::span<const double> nontargets, const DcfParams& params);
double compute_min_dcf(const ScoreSet& scores, const DcfParams& params);

/// Scores every trial against the enrollment and test tables (already
/// preprocessed). Order follows `trials`. Throws DataError naming the first
/// unknown id before any scoring happens.
ScoreSet score_all_trials(const PldaScorer& scorer, const EmbeddingTable& enrollments,
                          const EmbeddingTable& tests, std::span<const Trial> trials);

struct MetricsReport {
  double eer = 0.0;
  double min_dcf08 = 0.0;
  double min_dcf10 = 0.0;
};

MetricsReport evaluate(const ScoreSet& scores, const DcfParams& dcf08 = kDcf08,
                       const DcfParams& dcf10 = kDcf10);

/// "EER <f>", "EER_percent <f>", "minDCF08 <f>", "minDCF10 <f>", 6 decimals.
std::string format_report(const MetricsReport& report);
/// "p_miss,p_fa" header, then one line per point.
void write_det_csv(std::span<const DetPoint> points, const std::filesystem::path& path);

}  // namespace pxv

#endif  // PXV_METRICS_H_
