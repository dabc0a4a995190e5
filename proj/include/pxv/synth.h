// pxv/synth.h

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

// Synthetic speaker + senone corpus.
//
// Each frame is
//   speaker_scale * v_speaker + senone_scale * v_senone(t) + noise_scale * n(t)
// with v_speaker, v_senone fixed standard-normal vectors and n(t) iid
// standard normal. The senone sequence of an utterance is a run-length
// process: each frame keeps the current senone with probability 0.9 and
// otherwise jumps to a uniformly chosen different one, so runs average 10
// frames.

#ifndef PXV_SYNTH_H_
#define PXV_SYNTH_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pxv/data.h"
#include "pxv/text_io.h"

namespace pxv {

inline constexpr double kMeanSenoneRun = 10.0;

struct SynthConfig {
  std::size_t num_speakers = 40;
  std::size_t num_senones = 20;
  std::size_t feat_dim = 20;
  std::size_t utts_per_speaker = 15;
  std::size_t min_frames = 200;
  std::size_t max_frames = 400;
  double speaker_scale = 1.0;
  double senone_scale = 1.0;
  double noise_scale = 0.5;
  /// Fixes the senone inventory.
  std::uint64_t seed = 0;
  /// Fixes speakers, durations, senone walks and noise; defaults to `seed`.
  /// A corpus with the same seed but another speaker_seed has new speakers
  /// drawn over the same senone inventory.
  std::optional<std::uint64_t> speaker_seed;
  std::string id_prefix;

  void validate() const;
};

struct SynthCorpus {
  FeatureArchive archive;
  LabelTable labels;
};

SynthCorpus synth_generate(const SynthConfig& config);

/// Verification lists over a labelled corpus: for every speaker (in order
/// of first appearance) the first `enroll_per_speaker` utterances form the
/// enrollment "enroll-<first-utt-id>"; every remaining utterance is a test
/// segment scored against every enrollment.
struct TrialSet {
  std::vector<Enrollment> enrollments;
  std::vector<Trial> trials;
};

TrialSet make_trials(const FeatureArchive& archive, const LabelTable& labels,
                     std::size_t enroll_per_speaker);

}  // namespace pxv

#endif  // PXV_SYNTH_H_
