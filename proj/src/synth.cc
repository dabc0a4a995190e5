// src/synth.cc

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

#include "pxv/synth.h"

#include <cstdio>
#include <map>

#include "pxv/error.h"
#include "pxv/rng.h"

namespace pxv {
namespace {

Matrix gaussian_rows(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix m(rows, cols);
  for (double& v : m.values()) v = rng.normal();
  return m;
}

std::string utt_name(const std::string& prefix, std::size_t spk, std::size_t utt) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "spk%03zu-utt%03zu", spk, utt);
  return prefix + buf;
}

}  // namespace

void SynthConfig::validate() const {
  if (num_speakers == 0 || num_senones == 0 || feat_dim == 0 ||
      utts_per_speaker == 0 || min_frames == 0)
    throw ConfigError("synth: all counts must be >= 1");
  if (min_frames > max_frames)
    throw ConfigError("synth: min_frames exceeds max_frames");
  if (speaker_scale < 0 || senone_scale < 0 || noise_scale < 0)
    throw ConfigError("synth: scales must be >= 0");
}

SynthCorpus synth_generate(const SynthConfig& config) {
  config.validate();
  const std::uint64_t spk_seed = config.speaker_seed.value_or(config.seed);
  const std::size_t D = config.feat_dim;

  Rng senone_rng(derive_seed(config.seed, "senone-vectors"));
  const Matrix senone_vecs = gaussian_rows(config.num_senones, D, senone_rng);
  Rng speaker_rng(derive_seed(spk_seed, "speaker-vectors"));
  const Matrix speaker_vecs = gaussian_rows(config.num_speakers, D, speaker_rng);

  const double p_switch = 1.0 / kMeanSenoneRun;
  SynthCorpus corpus;
  for (std::size_t s = 0; s < config.num_speakers; ++s) {
    for (std::size_t u = 0; u < config.utts_per_speaker; ++u) {
      Rng rng(derive_seed(spk_seed, "utterance", s * config.utts_per_speaker + u));
      const std::size_t T = config.min_frames +
                            rng.uniform_int(config.max_frames - config.min_frames + 1);
      std::vector<std::size_t> senones(T);
      std::size_t current = rng.uniform_int(config.num_senones);
      for (std::size_t t = 0; t < T; ++t) {
        if (t > 0 && config.num_senones > 1 && rng.uniform() < p_switch) {
          // Uniform over the other senones.
          const std::size_t step = 1 + rng.uniform_int(config.num_senones - 1);
          current = (current + step) % config.num_senones;
        }
        senones[t] = current;
      }
      Matrix feats(T, D);
      for (std::size_t t = 0; t < T; ++t)
        for (std::size_t d = 0; d < D; ++d)
          feats(t, d) = config.speaker_scale * speaker_vecs(s, d) +
                        config.senone_scale * senone_vecs(senones[t], d) +
                        config.noise_scale * rng.normal();
      const std::string id = utt_name(config.id_prefix, s, u);
      corpus.labels.speaker_of.emplace(id, s);
      corpus.labels.senones_of.emplace(id, std::move(senones));
      corpus.archive.add(id, std::move(feats));
    }
  }
  return corpus;
}

TrialSet make_trials(const FeatureArchive& archive, const LabelTable& labels,
                     std::size_t enroll_per_speaker) {
  if (enroll_per_speaker == 0)
    throw ArgumentError("make_trials: enroll_per_speaker must be >= 1");
  std::vector<std::size_t> speaker_order;
  std::map<std::size_t, std::vector<std::string>> utts;
  for (std::size_t i = 0; i < archive.size(); ++i) {
    auto it = labels.speaker_of.find(archive.id(i));
    if (it == labels.speaker_of.end())
      throw DataError("no speaker label for utterance " + archive.id(i));
    if (!utts.count(it->second)) speaker_order.push_back(it->second);
    utts[it->second].push_back(archive.id(i));
  }
  TrialSet set;
  std::vector<std::pair<std::string, std::size_t>> tests;
  std::vector<std::size_t> enroll_speaker;
  for (std::size_t spk : speaker_order) {
    const auto& list = utts[spk];
    if (list.size() <= enroll_per_speaker) continue;
    Enrollment e{"enroll-" + list.front(), {}};
    e.utterances.assign(list.begin(), list.begin() + enroll_per_speaker);
    set.enrollments.push_back(std::move(e));
    enroll_speaker.push_back(spk);
    for (std::size_t k = enroll_per_speaker; k < list.size(); ++k)
      tests.emplace_back(list[k], spk);
  }
  for (std::size_t e = 0; e < set.enrollments.size(); ++e)
    for (const auto& [test, spk] : tests)
      set.trials.push_back({set.enrollments[e].id, test, spk == enroll_speaker[e]});
  return set;
}

}  // namespace pxv
