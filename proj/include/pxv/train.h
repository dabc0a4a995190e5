// pxv/train.h

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

// Mini-batch SGD for the x-vector, phonetic-vector and multi-task networks.
//
// Training is single-threaded at this level and a pure function of its
// inputs: batch order comes from make_batches, gradients are summed over a
// batch in example order, and the update is
//   w -= scale * (lr * mean_gradient)
// where scale is 1 except for the attached ASR layers of a phonetic-vector
// network, which use asr_lr_scale. Blocks with scale 0 are not touched.

#ifndef PXV_TRAIN_H_
#define PXV_TRAIN_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pxv/data.h"
#include "pxv/network.h"

namespace pxv {

enum class Variant { kBaseline, kPv, kMultiTask };

struct TrainConfig {
  double lr = 0.01;
  double asr_lr_scale = 0.2;
  std::size_t speaker_batch = 64;
  std::size_t phonetic_batch = 256;
  std::size_t epochs = 5;
  std::uint64_t seed = 0;
  Variant variant = Variant::kBaseline;
  std::size_t shared_layers = 4;  // n of MT-n

  void validate() const;
};

/// "baseline", "pv", "mt-1" ... "mt-5". Throws ConfigError otherwise.
void parse_variant(std::string_view name, TrainConfig& config);
std::string variant_name(const TrainConfig& config);

/// One labelled frame: row `center` of utterance `utterance`.
struct PhoneticExample {
  std::size_t utterance = 0;
  std::size_t center = 0;
  std::size_t senone = 0;
};

struct PhoneticDataset {
  std::vector<Matrix> utterances;
  std::vector<PhoneticExample> examples;
};

/// Every `stride`-th labelled frame of every utterance that has senone
/// labels.
PhoneticDataset make_phonetic_dataset(const FeatureArchive& archive,
                                      const LabelTable& labels, std::size_t stride = 1);

/// Shuffled partition of [0, count) keyed by (seed, epoch); the last batch
/// may be short.
std::vector<std::vector<std::size_t>> make_batches(std::size_t count,
                                                   std::size_t batch_size,
                                                   std::uint64_t seed,
                                                   std::uint64_t epoch);

struct SpeakerSplit {
  std::vector<SpeakerExample> train;
  std::vector<SpeakerExample> heldout;
};

/// Moves a seeded random sample of `heldout_count` examples out of the
/// training set (both halves keep their original relative order).
SpeakerSplit split_validation(std::vector<SpeakerExample> examples,
                              std::size_t heldout_count, std::uint64_t seed);

/// Fraction of segments whose highest-scoring speaker is the true one.
/// Exact ties are broken uniformly at random from a stream seeded by
/// `tie_seed`.
double validate(const NetworkParams& net, std::span<const SpeakerExample> heldout,
                std::uint64_t tie_seed = 0);

struct PhoneticEval {
  double loss = 0.0;      // mean frame cross-entropy
  double accuracy = 0.0;  // frame accuracy
};

PhoneticEval evaluate_phonetic(const NetworkParams& net, const PhoneticDataset& data);

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double valid_accuracy = 0.0;
};

/// "<epoch>\t<loss>\t<accuracy>" with 6 decimals.
std::string format_epoch_line(const EpochStats& stats);

using EpochCallback = std::function<void(const EpochStats&, const NetworkParams&)>;

/// One SGD step on the speaker objective; returns the mean batch loss.
double speaker_step(NetworkParams& net, std::span<const SpeakerExample> examples,
                    std::span<const std::size_t> batch, double lr, double asr_lr_scale);
/// One SGD step on the senone objective; returns the mean batch loss.
double phonetic_step(NetworkParams& net, const PhoneticDataset& data,
                     std::span<const std::size_t> batch, double lr);

/// Trains a fresh ASR network; logs training frame accuracy per epoch.
NetworkParams pretrain_asr(const PhoneticDataset& data, const AsrConfig& asr_config,
                           const TrainConfig& config, const EpochCallback& on_epoch = {});

/// Trains a fresh x-vector network.
NetworkParams train_xvector(const XVectorConfig& x_config,
                            std::span<const SpeakerExample> train,
                            std::span<const SpeakerExample> heldout,
                            const TrainConfig& config, const EpochCallback& on_epoch = {});

/// Speaker-objective training of an existing x-vector or phonetic-vector
/// network.
NetworkParams train_speaker(NetworkParams net, std::span<const SpeakerExample> train,
                            std::span<const SpeakerExample> heldout,
                            const TrainConfig& config, const EpochCallback& on_epoch = {});

NetworkParams joint_train_pv(NetworkParams pv_net, std::span<const SpeakerExample> train,
                             std::span<const SpeakerExample> heldout,
                             const TrainConfig& config, const EpochCallback& on_epoch = {});

/// Alternates [speaker batch, phonetic batch] until one stream runs out for
/// the epoch, then drains the other. Speaker batches update s/, fp/, l/;
/// phonetic batches update s/, ap/.
NetworkParams train_mt(NetworkParams mt_net, std::span<const SpeakerExample> train,
                       std::span<const SpeakerExample> heldout,
                       const PhoneticDataset& phonetic, const TrainConfig& config,
                       const EpochCallback& on_epoch = {});

}  // namespace pxv

#endif  // PXV_TRAIN_H_
