// src/network.cc

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

#include "pxv/network.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "pxv/error.h"
#include "pxv/rng.h"

namespace pxv {
namespace {

// ---------------------------------------------------------------------------
// Construction

AffineParams init_affine(std::size_t in, std::size_t out, std::uint64_t seed,
                         const std::string& name) {
  AffineParams p{Matrix(out, in), Vector(out, 0.0)};
  Rng rng(derive_seed(seed, name));
  const double a = std::sqrt(6.0 / static_cast<double>(in + out));
  for (double& w : p.weight.values()) w = rng.uniform(-a, a);
  return p;
}

std::string layer_name(Partition part, std::size_t index) {
  return std::string(partition_prefix(part)) + "tdnn" + std::to_string(index);
}

std::string segment_name(std::size_t k, std::size_t count) {
  return k + 1 == count ? "l/output" : "l/segment" + std::to_string(k + 1);
}

// Builds layers [first, last) of `specs`, taking `in_dim` columns into the
// first one. `aux_dim` extra columns are concatenated onto the input of the
// final layer.
std::vector<TdnnLayer> build_stack(std::span<const TdnnLayerSpec> specs,
                                   std::size_t first, std::size_t last,
                                   std::size_t in_dim, Partition part,
                                   std::uint64_t seed,
                                   std::size_t aux_dim = 0) {
  std::vector<TdnnLayer> layers;
  for (std::size_t k = first; k < last; ++k) {
    const auto& spec = specs[k];
    const std::size_t cols =
        (in_dim + (k + 1 == last ? aux_dim : 0)) * spec.offsets.size();
    layers.push_back({spec.offsets, init_affine(cols, spec.out_dim, seed,
                                                layer_name(part, k + 1))});
    in_dim = spec.out_dim;
  }
  return layers;
}

std::vector<AffineParams> build_segment(std::size_t pooled_dim,
                                        std::span<const std::size_t> dims,
                                        std::size_t num_speakers,
                                        std::uint64_t seed) {
  std::vector<AffineParams> layers;
  std::size_t in = pooled_dim;
  const std::size_t count = dims.size() + 1;
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t out = k < dims.size() ? dims[k] : num_speakers;
    layers.push_back(init_affine(in, out, seed, segment_name(k, count)));
    in = out;
  }
  return layers;
}

void validate_stack(std::span<const TdnnLayerSpec> layers, const char* what) {
  if (layers.size() != kNumFrameLayers)
    throw ConfigError(std::string(what) + ": expected " +
                      std::to_string(kNumFrameLayers) + " frame layers, got " +
                      std::to_string(layers.size()));
  for (const auto& l : layers) {
    if (l.out_dim == 0)
      throw ConfigError(std::string(what) + ": frame layer width must be >= 1");
    try {
      check_offsets(l.offsets);
    } catch (const ArgumentError& e) {
      throw ConfigError(std::string(what) + ": " + e.what());
    }
  }
}

// ---------------------------------------------------------------------------
// Forward / backward through a frame stack

struct StackTrace {
  std::vector<Matrix> spliced;  // affine inputs
  std::vector<Matrix> outputs;  // post-ReLU outputs
  std::size_t main_cols = 0;    // width of the non-aux part of the last input
};

Matrix run_stack(const std::vector<TdnnLayer>& layers, const Matrix& input,
                 StackTrace* trace, const Matrix* aux = nullptr) {
  if (layers.empty()) return input;
  const Matrix* h = &input;
  Matrix current;
  for (std::size_t k = 0; k < layers.size(); ++k) {
    Matrix spliced;
    if (aux != nullptr && k + 1 == layers.size()) {
      if (trace) trace->main_cols = h->cols();
      spliced = splice(concat_cols(*h, *aux), layers[k].offsets);
    } else {
      spliced = splice(*h, layers[k].offsets);
    }
    Matrix out = relu_forward(affine_forward(spliced, layers[k].affine));
    if (trace) {
      trace->spliced.push_back(std::move(spliced));
      trace->outputs.push_back(out);
    }
    current = std::move(out);
    h = &current;
  }
  return current;
}

void add_into(AffineParams& acc, const AffineParams& g) {
  auto a = acc.weight.values();
  const auto b = g.weight.values();
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  for (std::size_t i = 0; i < acc.bias.size(); ++i) acc.bias[i] += g.bias[i];
}

// Returns d(loss)/d(input) when `need_input_grad`, else an empty matrix.
// The gradient reaching the aux columns of the last layer goes to `aux_grad`.
Matrix backward_stack(const std::vector<TdnnLayer>& layers,
                      const StackTrace& trace, Matrix grad_out,
                      std::vector<TdnnLayer>& grads, bool need_input_grad,
                      Matrix* aux_grad = nullptr) {
  Matrix g = std::move(grad_out);
  for (std::size_t k = layers.size(); k-- > 0;) {
    const Matrix g_pre = relu_backward(trace.outputs[k], g);
    const bool want_input = k > 0 || need_input_grad ||
                            (aux_grad != nullptr && k + 1 == layers.size());
    GradPair gp = affine_backward(trace.spliced[k], layers[k].affine, g_pre,
                                  want_input);
    add_into(grads[k].affine, *gp.wrt_params);
    if (!want_input) return Matrix();
    Matrix g_in = splice_backward(gp.wrt_input, layers[k].offsets,
                                  trace.spliced[k].rows());
    if (aux_grad != nullptr && k + 1 == layers.size()) {
      auto [main, aux] = split_cols(g_in, trace.main_cols);
      *aux_grad = std::move(aux);
      g = std::move(main);
    } else {
      g = std::move(g_in);
    }
    if (k == 0 && !need_input_grad) return Matrix();
  }
  return g;
}

Matrix as_row(std::span<const double> v) {
  return Matrix::from_rows(1, v.size(), Vector(v.begin(), v.end()));
}

// ---------------------------------------------------------------------------
// Speaker path

struct SpeakerTrace {
  StackTrace shared, asr, speaker;
  Matrix frame_out;
  std::vector<Matrix> seg_inputs;  // input of each segment affine
  std::vector<Matrix> seg_outputs;  // post-ReLU output of hidden layers
  Vector logits;
  Vector embedding;  // pre-activation of the first segment affine
};

void check_input(const NetworkParams& net, const Matrix& features) {
  if (features.rows() == 0) throw ShapeError("network input has no frames");
  const std::size_t want = net.input_dim();
  if (features.cols() != want)
    throw ShapeError("network expects " + std::to_string(want) +
                     "-dim features, got " + std::to_string(features.cols()));
}

Matrix speaker_frames(const NetworkParams& net, const Matrix& features,
                      SpeakerTrace* tr) {
  if (!net.has_speaker_head())
    throw ArgumentError(std::string(to_string(net.kind)) +
                        " network has no speaker head");
  check_input(net, features);
  Matrix trunk = run_stack(net.shared, features, tr ? &tr->shared : nullptr);
  std::optional<Matrix> bottleneck;
  if (net.kind == NetKind::kPhoneticVector)
    bottleneck = run_stack(net.asr_frame, features, tr ? &tr->asr : nullptr);
  return run_stack(net.speaker_frame, trunk, tr ? &tr->speaker : nullptr,
                   bottleneck ? &*bottleneck : nullptr);
}

Vector speaker_forward(const NetworkParams& net, const Matrix& features,
                       SpeakerTrace* tr) {
  Matrix frame_out = speaker_frames(net, features, tr);
  Matrix h = as_row(stats_pool(frame_out));
  if (tr) tr->frame_out = std::move(frame_out);
  for (std::size_t k = 0; k < net.segment.size(); ++k) {
    Matrix pre = affine_forward(h, net.segment[k]);
    if (tr) {
      tr->seg_inputs.push_back(h);
      if (k == 0) tr->embedding.assign(pre.values().begin(), pre.values().end());
    }
    if (k + 1 == net.segment.size()) return Vector(pre.values().begin(), pre.values().end());
    h = relu_forward(pre);
    if (tr) tr->seg_outputs.push_back(h);
  }
  return {};
}

// ---------------------------------------------------------------------------
// Phonetic path

Matrix phonetic_frames(const NetworkParams& net, const Matrix& features,
                       StackTrace* shared_tr, StackTrace* asr_tr) {
  if (!net.has_asr_head())
    throw ArgumentError(std::string(to_string(net.kind)) +
                        " network has no senone head");
  check_input(net, features);
  Matrix trunk = run_stack(net.shared, features, shared_tr);
  return run_stack(net.asr_frame, trunk, asr_tr);
}

}  // namespace

// ---------------------------------------------------------------------------
// Configs

std::vector<TdnnLayerSpec> default_frame_layers() {
  return {{{-2, -1, 0, 1, 2}, 512},
          {{-2, 0, 2}, 512},
          {{-3, 0, 3}, 512},
          {{0}, 512},
          {{0}, 1500}};
}

void XVectorConfig::validate() const {
  validate_stack(frame_layers, "x-vector config");
  if (segment_dims.empty())
    throw ConfigError("x-vector config: at least one segment layer required");
  for (std::size_t d : segment_dims)
    if (d == 0) throw ConfigError("x-vector config: segment width must be >= 1");
  if (num_speakers == 0) throw ConfigError("x-vector config: num_speakers must be >= 1");
  if (feat_dim == 0) throw ConfigError("x-vector config: feat_dim must be >= 1");
}

void AsrConfig::validate() const {
  validate_stack(frame_layers, "ASR config");
  if (frame_layers.back().out_dim != bottleneck_dim)
    throw ConfigError("ASR config: last frame layer width " +
                      std::to_string(frame_layers.back().out_dim) +
                      " differs from bottleneck_dim " +
                      std::to_string(bottleneck_dim));
  if (num_senones == 0) throw ConfigError("ASR config: num_senones must be >= 1");
  if (feat_dim == 0) throw ConfigError("ASR config: feat_dim must be >= 1");
}

AsrConfig make_asr_config(const XVectorConfig& x, std::size_t num_senones,
                          std::size_t hidden_dim, std::size_t bottleneck_dim) {
  AsrConfig c;
  c.frame_layers = x.frame_layers;
  for (auto& l : c.frame_layers) l.out_dim = hidden_dim;
  if (!c.frame_layers.empty()) c.frame_layers.back().out_dim = bottleneck_dim;
  c.bottleneck_dim = bottleneck_dim;
  c.num_senones = num_senones;
  c.feat_dim = x.feat_dim;
  return c;
}

void MtConfig::validate() const {
  x_config.validate();
  if (shared_layers < 1 || shared_layers > x_config.frame_layers.size())
    throw ConfigError("multi-task config: shared layer count " +
                      std::to_string(shared_layers) + " outside [1, " +
                      std::to_string(x_config.frame_layers.size()) + "]");
  if (num_senones == 0) throw ConfigError("multi-task config: num_senones must be >= 1");
}

const char* to_string(NetKind kind) {
  switch (kind) {
    case NetKind::kXVector: return "x-vector";
    case NetKind::kAsr: return "asr";
    case NetKind::kPhoneticVector: return "phonetic-vector";
    case NetKind::kMultiTask: return "multi-task";
  }
  return "?";
}

const char* partition_prefix(Partition p) {
  switch (p) {
    case Partition::kShared: return "s/";
    case Partition::kSpeakerFrame: return "fp/";
    case Partition::kSegment: return "l/";
    case Partition::kAsrPrivate: return "ap/";
    case Partition::kAsr: return "a/";
    case Partition::kFrame: return "f/";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// NetworkParams

std::size_t NetworkParams::input_dim() const {
  const std::vector<TdnnLayer>* first = nullptr;
  if (!shared.empty()) first = &shared;
  else if (!speaker_frame.empty()) first = &speaker_frame;
  else if (!asr_frame.empty()) first = &asr_frame;
  if (first == nullptr) return 0;
  const auto& l = first->front();
  return l.affine.in_dim() / l.offsets.size();
}

std::size_t NetworkParams::num_speakers() const {
  return segment.empty() ? 0 : segment.back().out_dim();
}

std::size_t NetworkParams::num_senones() const {
  return asr_output ? asr_output->out_dim() : 0;
}

std::size_t NetworkParams::embedding_dim() const {
  return segment.empty() ? 0 : segment.front().out_dim();
}

namespace {

template <class Net, class Block>
std::vector<Block> collect_blocks(Net& net) {
  std::vector<Block> out;
  const bool mt = net.kind == NetKind::kMultiTask;
  auto add_affine = [&](const std::string& base, Partition part, auto& a) {
    out.push_back({base + ".weight", part, a.weight.rows(), a.weight.cols(),
                   a.weight.values()});
    out.push_back({base + ".bias", part, 1, a.bias.size(),
                   std::span(a.bias.data(), a.bias.size())});
  };
  auto add_stack = [&](auto& layers, Partition part, std::size_t first_index) {
    for (std::size_t k = 0; k < layers.size(); ++k)
      add_affine(layer_name(part, first_index + k), part, layers[k].affine);
  };
  const std::size_t branch_base = net.shared.size() + 1;
  add_stack(net.shared, Partition::kShared, 1);
  add_stack(net.speaker_frame, mt ? Partition::kSpeakerFrame : Partition::kFrame,
            branch_base);
  for (std::size_t k = 0; k < net.segment.size(); ++k)
    add_affine(segment_name(k, net.segment.size()), Partition::kSegment,
               net.segment[k]);
  const Partition asr_part = mt ? Partition::kAsrPrivate : Partition::kAsr;
  add_stack(net.asr_frame, asr_part, branch_base);
  if (net.asr_output)
    add_affine(std::string(partition_prefix(asr_part)) + "output", asr_part,
               *net.asr_output);
  return out;
}

}  // namespace

std::vector<ParamBlock> blocks(NetworkParams& net) {
  return collect_blocks<NetworkParams, ParamBlock>(net);
}

std::vector<ConstParamBlock> blocks(const NetworkParams& net) {
  return collect_blocks<const NetworkParams, ConstParamBlock>(net);
}

NetworkParams zeros_like(const NetworkParams& net) {
  NetworkParams z = net;
  for (auto& b : blocks(z)) std::fill(b.values.begin(), b.values.end(), 0.0);
  return z;
}

std::uint64_t checksum(const NetworkParams& net,
                       std::initializer_list<Partition> partitions) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const void* p, std::size_t n) {
    const auto* c = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= c[i];
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& b : blocks(net)) {
    if (partitions.size() != 0 &&
        std::find(partitions.begin(), partitions.end(), b.partition) ==
            partitions.end())
      continue;
    feed(b.name.data(), b.name.size());
    feed(b.values.data(), b.values.size() * sizeof(double));
  }
  return h;
}

std::uint64_t checksum(const NetworkParams& net) { return checksum(net, {}); }

// ---------------------------------------------------------------------------
// Builders

NetworkParams build_xvector(const XVectorConfig& config, std::uint64_t seed) {
  config.validate();
  NetworkParams net;
  net.kind = NetKind::kXVector;
  net.speaker_frame = build_stack(config.frame_layers, 0, kNumFrameLayers,
                                  config.feat_dim, Partition::kFrame, seed);
  net.segment = build_segment(config.pooled_dim(), config.segment_dims,
                              config.num_speakers, seed);
  return net;
}

NetworkParams build_asr(const AsrConfig& config, std::uint64_t seed) {
  config.validate();
  NetworkParams net;
  net.kind = NetKind::kAsr;
  net.asr_frame = build_stack(config.frame_layers, 0, kNumFrameLayers,
                              config.feat_dim, Partition::kAsr, seed);
  net.asr_output = init_affine(config.bottleneck_dim, config.num_senones, seed,
                               "a/output");
  return net;
}

NetworkParams build_pv_network(const XVectorConfig& x_config,
                               const AsrConfig& asr_config,
                               const NetworkParams& pretrained_asr,
                               std::uint64_t seed) {
  x_config.validate();
  asr_config.validate();
  if (x_config.feat_dim != asr_config.feat_dim)
    throw ShapeError("PV network: x-vector feat_dim " +
                     std::to_string(x_config.feat_dim) + " vs ASR feat_dim " +
                     std::to_string(asr_config.feat_dim));
  if (pretrained_asr.kind != NetKind::kAsr)
    throw ShapeError("PV network: pretrained model is a " +
                     std::string(to_string(pretrained_asr.kind)) +
                     " network, expected asr");
  const NetworkParams reference = build_asr(asr_config, 0);
  const auto want = blocks(reference);
  const auto have = blocks(pretrained_asr);
  bool compatible = want.size() == have.size();
  for (std::size_t i = 0; compatible && i < want.size(); ++i)
    compatible = want[i].rows == have[i].rows && want[i].cols == have[i].cols;
  for (std::size_t k = 0; compatible && k < reference.asr_frame.size(); ++k)
    compatible = reference.asr_frame[k].offsets == pretrained_asr.asr_frame[k].offsets;
  if (!compatible)
    throw ShapeError("PV network: pretrained ASR parameters do not match the ASR config");

  NetworkParams net;
  net.kind = NetKind::kPhoneticVector;
  net.asr_frame = pretrained_asr.asr_frame;
  net.asr_output = pretrained_asr.asr_output;
  net.speaker_frame =
      build_stack(x_config.frame_layers, 0, kNumFrameLayers, x_config.feat_dim,
                  Partition::kFrame, seed, asr_config.bottleneck_dim);
  net.segment = build_segment(x_config.pooled_dim(), x_config.segment_dims,
                              x_config.num_speakers, seed);
  return net;
}

NetworkParams build_mt_network(const MtConfig& config, std::uint64_t seed) {
  config.validate();
  const auto& x = config.x_config;
  const std::size_t n = config.shared_layers;
  NetworkParams net;
  net.kind = NetKind::kMultiTask;
  net.shared = build_stack(x.frame_layers, 0, n, x.feat_dim, Partition::kShared, seed);
  const std::size_t trunk_dim = x.frame_layers[n - 1].out_dim;
  net.speaker_frame = build_stack(x.frame_layers, n, kNumFrameLayers, trunk_dim,
                                  Partition::kSpeakerFrame, seed);
  net.segment = build_segment(x.pooled_dim(), x.segment_dims, x.num_speakers, seed);
  net.asr_frame = build_stack(x.frame_layers, n, kNumFrameLayers, trunk_dim,
                              Partition::kAsrPrivate, seed);
  net.asr_output = init_affine(x.frame_layers.back().out_dim, config.num_senones,
                               seed, "ap/output");
  return net;
}

// ---------------------------------------------------------------------------
// Context

Context receptive_context(std::span<const TdnnLayerSpec> layers) {
  Context c;
  for (const auto& l : layers) {
    if (l.offsets.empty()) continue;
    c.left += std::max(0, -l.offsets.front());
    c.right += std::max(0, l.offsets.back());
  }
  return c;
}

namespace {

Context stack_context(const std::vector<TdnnLayer>& layers) {
  std::vector<TdnnLayerSpec> specs;
  for (const auto& l : layers) specs.push_back({l.offsets, l.affine.out_dim()});
  return receptive_context(specs);
}

Context add(Context a, Context b) { return {a.left + b.left, a.right + b.right}; }

}  // namespace

Context speaker_context(const NetworkParams& net) {
  Context c = add(stack_context(net.shared), stack_context(net.speaker_frame));
  if (net.kind == NetKind::kPhoneticVector && !net.speaker_frame.empty()) {
    // The bottleneck enters at the last speaker layer.
    const auto& last = net.speaker_frame.back().offsets;
    Context via_asr = stack_context(net.asr_frame);
    via_asr.left += std::max(0, -last.front());
    via_asr.right += std::max(0, last.back());
    c.left = std::max(c.left, via_asr.left);
    c.right = std::max(c.right, via_asr.right);
  }
  return c;
}

Context phonetic_context(const NetworkParams& net) {
  return add(stack_context(net.shared), stack_context(net.asr_frame));
}

Window context_window(const Matrix& utterance, std::size_t center,
                      Context context) {
  if (center >= utterance.rows())
    throw ArgumentError("context window: center " + std::to_string(center) +
                        " outside " + std::to_string(utterance.rows()) +
                        "-frame utterance");
  const std::size_t lo =
      center >= static_cast<std::size_t>(context.left) ? center - context.left : 0;
  const std::size_t hi =
      std::min(utterance.rows() - 1, center + static_cast<std::size_t>(context.right));
  Window w;
  w.center = center - lo;
  w.frames = Matrix(hi - lo + 1, utterance.cols());
  std::copy(utterance.data() + lo * utterance.cols(),
            utterance.data() + (hi + 1) * utterance.cols(), w.frames.data());
  return w;
}

// ---------------------------------------------------------------------------
// Forwards

Vector speaker_logits(const NetworkParams& net, const Matrix& features) {
  return speaker_forward(net, features, nullptr);
}

Vector xvector_forward(const NetworkParams& net, const Matrix& features) {
  return softmax(speaker_logits(net, features));
}

Matrix frame_level_output(const NetworkParams& net, const Matrix& features) {
  return speaker_frames(net, features, nullptr);
}

Vector pooled_stats(const NetworkParams& net, const Matrix& features) {
  return stats_pool(frame_level_output(net, features));
}

Vector embedding_preactivation(const NetworkParams& net,
                               const Matrix& features) {
  const Matrix pooled = as_row(pooled_stats(net, features));
  const Matrix pre = affine_forward(pooled, net.segment.front());
  return Vector(pre.values().begin(), pre.values().end());
}

Matrix asr_frame_output(const NetworkParams& net, const Matrix& features) {
  if (net.asr_frame.empty() && net.shared.empty())
    throw ArgumentError(std::string(to_string(net.kind)) +
                        " network has no ASR frame layers");
  check_input(net, features);
  return run_stack(net.asr_frame, run_stack(net.shared, features, nullptr), nullptr);
}

Matrix asr_forward(const NetworkParams& net, const Matrix& features) {
  const Matrix h = phonetic_frames(net, features, nullptr, nullptr);
  return softmax_rows(affine_forward(h, *net.asr_output));
}

// ---------------------------------------------------------------------------
// Gradients

double speaker_loss(const NetworkParams& net, const Matrix& features,
                    std::size_t speaker) {
  return softmax_xent(speaker_logits(net, features), speaker).loss;
}

double speaker_loss_gradient(const NetworkParams& net, const Matrix& features,
                             std::size_t speaker, NetworkParams& grad) {
  SpeakerTrace tr;
  tr.logits = speaker_forward(net, features, &tr);
  const XentResult xent = softmax_xent(tr.logits, speaker);

  // Segment layers, output to input.
  Matrix g = as_row(xent.grad);
  for (std::size_t k = net.segment.size(); k-- > 0;) {
    if (k + 1 < net.segment.size()) g = relu_backward(tr.seg_outputs[k], g);
    GradPair gp = affine_backward(tr.seg_inputs[k], net.segment[k], g);
    add_into(grad.segment[k], *gp.wrt_params);
    g = std::move(gp.wrt_input);
  }
  Matrix g_frames = stats_pool_backward(tr.frame_out, g.values());

  const bool pv = net.kind == NetKind::kPhoneticVector;
  Matrix g_bottleneck;
  Matrix g_trunk;
  if (!net.speaker_frame.empty()) {
    g_trunk = backward_stack(net.speaker_frame, tr.speaker, std::move(g_frames),
                             grad.speaker_frame, !net.shared.empty(),
                             pv ? &g_bottleneck : nullptr);
  } else {
    g_trunk = std::move(g_frames);
  }
  if (pv) backward_stack(net.asr_frame, tr.asr, std::move(g_bottleneck),
                         grad.asr_frame, false);
  if (!net.shared.empty())
    backward_stack(net.shared, tr.shared, std::move(g_trunk), grad.shared, false);
  return xent.loss;
}

double phonetic_loss(const NetworkParams& net, const Matrix& window,
                     std::size_t center, std::size_t senone) {
  if (center >= window.rows())
    throw ArgumentError("phonetic loss: center row outside window");
  const Matrix h = phonetic_frames(net, window, nullptr, nullptr);
  const Matrix logits = affine_forward(as_row(h.row(center)), *net.asr_output);
  return softmax_xent(logits.values(), senone).loss;
}

double phonetic_loss_gradient(const NetworkParams& net, const Matrix& window,
                              std::size_t center, std::size_t senone,
                              NetworkParams& grad) {
  if (center >= window.rows())
    throw ArgumentError("phonetic loss: center row outside window");
  StackTrace shared_tr, asr_tr;
  const Matrix h = phonetic_frames(net, window, &shared_tr, &asr_tr);
  const Matrix h_center = as_row(h.row(center));
  const Matrix logits = affine_forward(h_center, *net.asr_output);
  const XentResult xent = softmax_xent(logits.values(), senone);

  GradPair gp = affine_backward(h_center, *net.asr_output, as_row(xent.grad));
  add_into(*grad.asr_output, *gp.wrt_params);
  Matrix g_h(h.rows(), h.cols());
  std::copy(gp.wrt_input.values().begin(), gp.wrt_input.values().end(),
            g_h.row(center).begin());

  Matrix g_trunk;
  if (!net.asr_frame.empty()) {
    g_trunk = backward_stack(net.asr_frame, asr_tr, std::move(g_h),
                             grad.asr_frame, !net.shared.empty());
  } else {
    g_trunk = std::move(g_h);
  }
  if (!net.shared.empty())
    backward_stack(net.shared, shared_tr, std::move(g_trunk), grad.shared, false);
  return xent.loss;
}

}  // namespace pxv
