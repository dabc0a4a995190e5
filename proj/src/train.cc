// src/train.cc

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

#include "pxv/train.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "pxv/error.h"
#include "pxv/log.h"
#include "pxv/rng.h"

namespace pxv {
namespace {

// Learning-rate multiplier per partition; 0 means "not updated".
using ScaleFn = double (*)(Partition, double asr_scale);

double speaker_scale(Partition p, double asr_scale) {
  switch (p) {
    case Partition::kShared:
    case Partition::kSpeakerFrame:
    case Partition::kSegment:
    case Partition::kFrame:
      return 1.0;
    case Partition::kAsr:
      return asr_scale;
    case Partition::kAsrPrivate:
      return 0.0;
  }
  return 0.0;
}

double phonetic_scale(Partition p, double) {
  switch (p) {
    case Partition::kShared:
    case Partition::kAsrPrivate:
    case Partition::kAsr:
      return 1.0;
    default:
      return 0.0;
  }
}

void apply_sgd(NetworkParams& net, const NetworkParams& grad, double lr,
               std::size_t batch, ScaleFn scale, double asr_scale) {
  auto params = blocks(net);
  const auto grads = blocks(grad);
  const double n = static_cast<double>(batch);
  for (std::size_t b = 0; b < params.size(); ++b) {
    const double s = scale(params[b].partition, asr_scale);
    if (s == 0.0) continue;
    auto w = params[b].values;
    auto g = grads[b].values;
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= s * (lr * (g[i] / n));
  }
}

void check_speakers(const NetworkParams& net, std::span<const SpeakerExample> examples) {
  const std::size_t k = net.num_speakers();
  for (const auto& ex : examples)
    if (ex.speaker >= k)
      throw DataError("speaker index " + std::to_string(ex.speaker) + " of segment " +
                      ex.utt_id + " exceeds the " + std::to_string(k) +
                      " network outputs");
}

void check_senones(const NetworkParams& net, const PhoneticDataset& data) {
  const std::size_t k = net.num_senones();
  for (const auto& ex : data.examples) {
    if (ex.senone >= k)
      throw DataError("senone index " + std::to_string(ex.senone) + " exceeds the " +
                      std::to_string(k) + " network outputs");
    if (ex.utterance >= data.utterances.size() ||
        ex.center >= data.utterances[ex.utterance].rows())
      throw DataError("phonetic example refers outside its utterance");
  }
}

// Runs the speaker batches of one epoch interleaved with optional phonetic
// batches; returns the mean speaker loss per segment.
double run_epoch(NetworkParams& net, std::span<const SpeakerExample> train,
                 const PhoneticDataset* phonetic, const TrainConfig& config,
                 std::size_t epoch) {
  const auto sb = make_batches(train.size(), config.speaker_batch,
                               derive_seed(config.seed, "speaker-batches"), epoch);
  std::vector<std::vector<std::size_t>> pb;
  if (phonetic)
    pb = make_batches(phonetic->examples.size(), config.phonetic_batch,
                      derive_seed(config.seed, "phonetic-batches"), epoch);
  double loss_sum = 0.0;
  const std::size_t rounds = std::max(sb.size(), pb.size());
  for (std::size_t i = 0; i < rounds; ++i) {
    if (i < sb.size())
      loss_sum += speaker_step(net, train, sb[i], config.lr, config.asr_lr_scale) *
                  static_cast<double>(sb[i].size());
    if (i < pb.size()) phonetic_step(net, *phonetic, pb[i], config.lr);
  }
  return loss_sum / static_cast<double>(train.size());
}

NetworkParams speaker_loop(NetworkParams net, std::span<const SpeakerExample> train,
                           std::span<const SpeakerExample> heldout,
                           const PhoneticDataset* phonetic, const TrainConfig& config,
                           const EpochCallback& on_epoch) {
  config.validate();
  if (train.empty()) throw DataError("no speaker training examples");
  check_speakers(net, train);
  check_speakers(net, heldout);
  if (phonetic) {
    if (phonetic->examples.empty()) throw DataError("no phonetic training examples");
    check_senones(net, *phonetic);
  }
  for (std::size_t e = 1; e <= config.epochs; ++e) {
    EpochStats stats;
    stats.epoch = e;
    stats.train_loss = run_epoch(net, train, phonetic, config, e);
    stats.valid_accuracy = validate(net, heldout, derive_seed(config.seed, "tie-break", e));
    log::info(std::string(to_string(net.kind)) + " " + format_epoch_line(stats));
    if (on_epoch) on_epoch(stats, net);
  }
  return net;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw ConfigError("train.lr must be a finite value >= 0");
  if (!(asr_lr_scale >= 0.0) || !std::isfinite(asr_lr_scale))
    throw ConfigError("train.asr_lr_scale must be a finite value >= 0");
  if (speaker_batch == 0) throw ConfigError("train.speaker_batch must be >= 1");
  if (phonetic_batch == 0) throw ConfigError("train.phonetic_batch must be >= 1");
  if (variant == Variant::kMultiTask && (shared_layers == 0 || shared_layers > kNumFrameLayers))
    throw ConfigError("mt-n requires 1 <= n <= " + std::to_string(kNumFrameLayers));
}

void parse_variant(std::string_view name, TrainConfig& config) {
  if (name == "baseline") {
    config.variant = Variant::kBaseline;
  } else if (name == "pv") {
    config.variant = Variant::kPv;
  } else if (name.size() == 4 && name.substr(0, 3) == "mt-" && name[3] >= '1' &&
             name[3] <= static_cast<char>('0' + kNumFrameLayers)) {
    config.variant = Variant::kMultiTask;
    config.shared_layers = static_cast<std::size_t>(name[3] - '0');
  } else {
    throw ConfigError("unknown variant '" + std::string(name) +
                      "' (expected baseline, pv or mt-1 ... mt-5)");
  }
}

std::string variant_name(const TrainConfig& config) {
  switch (config.variant) {
    case Variant::kBaseline:
      return "baseline";
    case Variant::kPv:
      return "pv";
    case Variant::kMultiTask:
      return "mt-" + std::to_string(config.shared_layers);
  }
  return "?";
}

PhoneticDataset make_phonetic_dataset(const FeatureArchive& archive,
                                      const LabelTable& labels, std::size_t stride) {
  if (stride == 0) throw ArgumentError("phonetic stride must be >= 1");
  PhoneticDataset data;
  for (std::size_t u = 0; u < archive.size(); ++u) {
    auto it = labels.senones_of.find(archive.id(u));
    if (it == labels.senones_of.end() || it->second.empty()) continue;
    const Matrix& feats = archive.features(u);
    if (it->second.size() != feats.rows())
      throw DataError("senone labels of " + archive.id(u) + " do not match its frame count");
    const std::size_t index = data.utterances.size();
    data.utterances.push_back(feats);
    for (std::size_t t = 0; t < feats.rows(); t += stride)
      data.examples.push_back({index, t, it->second[t]});
  }
  return data;
}

std::vector<std::vector<std::size_t>> make_batches(std::size_t count,
                                                   std::size_t batch_size,
                                                   std::uint64_t seed,
                                                   std::uint64_t epoch) {
  if (batch_size == 0) throw ArgumentError("batch size must be >= 1");
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, "shuffle", epoch));
  for (std::size_t i = count; i > 1; --i) std::swap(order[i - 1], order[rng.uniform_int(i)]);
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t start = 0; start < count; start += batch_size)
    batches.emplace_back(order.begin() + start,
                         order.begin() + std::min(count, start + batch_size));
  return batches;
}

SpeakerSplit split_validation(std::vector<SpeakerExample> examples,
                              std::size_t heldout_count, std::uint64_t seed) {
  if (heldout_count >= examples.size() && heldout_count > 0)
    throw DataError("validation set of " + std::to_string(heldout_count) +
                    " segments leaves no training data");
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, "validation-split"));
  for (std::size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[rng.uniform_int(i)]);
  std::vector<bool> held(examples.size(), false);
  for (std::size_t k = 0; k < heldout_count; ++k) held[order[k]] = true;
  SpeakerSplit split;
  for (std::size_t i = 0; i < examples.size(); ++i)
    (held[i] ? split.heldout : split.train).push_back(std::move(examples[i]));
  return split;
}

double validate(const NetworkParams& net, std::span<const SpeakerExample> heldout,
                std::uint64_t tie_seed) {
  if (heldout.empty()) return 0.0;
  Rng rng(tie_seed);
  std::size_t correct = 0;
  std::vector<std::size_t> best;
  for (const auto& ex : heldout) {
    const Vector logits = speaker_logits(net, ex.features);
    const double top = *std::max_element(logits.begin(), logits.end());
    best.clear();
    for (std::size_t k = 0; k < logits.size(); ++k)
      if (logits[k] == top) best.push_back(k);
    const std::size_t pick = best.size() == 1 ? best[0] : best[rng.uniform_int(best.size())];
    if (pick == ex.speaker) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(heldout.size());
}

PhoneticEval evaluate_phonetic(const NetworkParams& net, const PhoneticDataset& data) {
  if (data.examples.empty()) throw DataError("no phonetic examples to evaluate");
  check_senones(net, data);
  std::vector<std::vector<const PhoneticExample*>> by_utt(data.utterances.size());
  for (const auto& ex : data.examples) by_utt[ex.utterance].push_back(&ex);
  double loss = 0.0;
  std::size_t correct = 0;
  for (std::size_t u = 0; u < by_utt.size(); ++u) {
    if (by_utt[u].empty()) continue;
    const Matrix post = asr_forward(net, data.utterances[u]);
    for (const PhoneticExample* ex : by_utt[u]) {
      auto row = post.row(ex->center);
      loss -= std::log(std::max(row[ex->senone], std::numeric_limits<double>::min()));
      const auto arg = static_cast<std::size_t>(
          std::max_element(row.begin(), row.end()) - row.begin());
      if (arg == ex->senone) ++correct;
    }
  }
  const double n = static_cast<double>(data.examples.size());
  return {loss / n, static_cast<double>(correct) / n};
}

std::string format_epoch_line(const EpochStats& stats) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%zu\t%.6f\t%.6f", stats.epoch, stats.train_loss,
                stats.valid_accuracy);
  return buf;
}

double speaker_step(NetworkParams& net, std::span<const SpeakerExample> examples,
                    std::span<const std::size_t> batch, double lr, double asr_lr_scale) {
  if (net.kind == NetKind::kAsr) throw ArgumentError("speaker step on an ASR network");
  if (batch.empty()) throw ArgumentError("empty batch");
  NetworkParams grad = zeros_like(net);
  double loss = 0.0;
  for (std::size_t i : batch) {
    const auto& ex = examples[i];
    loss += speaker_loss_gradient(net, ex.features, ex.speaker, grad);
  }
  apply_sgd(net, grad, lr, batch.size(), speaker_scale, asr_lr_scale);
  return loss / static_cast<double>(batch.size());
}

double phonetic_step(NetworkParams& net, const PhoneticDataset& data,
                     std::span<const std::size_t> batch, double lr) {
  if (net.kind != NetKind::kAsr && net.kind != NetKind::kMultiTask)
    throw ArgumentError(std::string("phonetic step on a ") + to_string(net.kind) + " network");
  if (batch.empty()) throw ArgumentError("empty batch");
  const Context ctx = phonetic_context(net);
  NetworkParams grad = zeros_like(net);
  double loss = 0.0;
  for (std::size_t i : batch) {
    const auto& ex = data.examples[i];
    const Window w = context_window(data.utterances[ex.utterance], ex.center, ctx);
    loss += phonetic_loss_gradient(net, w.frames, w.center, ex.senone, grad);
  }
  apply_sgd(net, grad, lr, batch.size(), phonetic_scale, 1.0);
  return loss / static_cast<double>(batch.size());
}

NetworkParams pretrain_asr(const PhoneticDataset& data, const AsrConfig& asr_config,
                           const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  if (data.examples.empty()) throw DataError("no phonetic training examples");
  NetworkParams net = build_asr(asr_config, derive_seed(config.seed, "asr-init"));
  check_senones(net, data);
  for (std::size_t e = 1; e <= config.epochs; ++e) {
    const auto pb = make_batches(data.examples.size(), config.phonetic_batch,
                                 derive_seed(config.seed, "asr-batches"), e);
    double loss_sum = 0.0;
    for (const auto& b : pb)
      loss_sum += phonetic_step(net, data, b, config.lr) * static_cast<double>(b.size());
    EpochStats stats;
    stats.epoch = e;
    stats.train_loss = loss_sum / static_cast<double>(data.examples.size());
    stats.valid_accuracy = evaluate_phonetic(net, data).accuracy;
    log::info("asr " + format_epoch_line(stats));
    if (on_epoch) on_epoch(stats, net);
  }
  return net;
}

NetworkParams train_xvector(const XVectorConfig& x_config,
                            std::span<const SpeakerExample> train,
                            std::span<const SpeakerExample> heldout,
                            const TrainConfig& config, const EpochCallback& on_epoch) {
  return train_speaker(build_xvector(x_config, derive_seed(config.seed, "xvector-init")),
                       train, heldout, config, on_epoch);
}

NetworkParams train_speaker(NetworkParams net, std::span<const SpeakerExample> train,
                            std::span<const SpeakerExample> heldout,
                            const TrainConfig& config, const EpochCallback& on_epoch) {
  if (net.kind != NetKind::kXVector && net.kind != NetKind::kPhoneticVector)
    throw ArgumentError(std::string("speaker training of a ") + to_string(net.kind) +
                        " network");
  return speaker_loop(std::move(net), train, heldout, nullptr, config, on_epoch);
}

NetworkParams joint_train_pv(NetworkParams pv_net, std::span<const SpeakerExample> train,
                             std::span<const SpeakerExample> heldout,
                             const TrainConfig& config, const EpochCallback& on_epoch) {
  if (pv_net.kind != NetKind::kPhoneticVector)
    throw ArgumentError(std::string("joint PV training of a ") + to_string(pv_net.kind) +
                        " network");
  return speaker_loop(std::move(pv_net), train, heldout, nullptr, config, on_epoch);
}

NetworkParams train_mt(NetworkParams mt_net, std::span<const SpeakerExample> train,
                       std::span<const SpeakerExample> heldout,
                       const PhoneticDataset& phonetic, const TrainConfig& config,
                       const EpochCallback& on_epoch) {
  if (mt_net.kind != NetKind::kMultiTask)
    throw ArgumentError(std::string("multi-task training of a ") + to_string(mt_net.kind) +
                        " network");
  return speaker_loop(std::move(mt_net), train, heldout, &phonetic, config, on_epoch);
}

}  // namespace pxv
