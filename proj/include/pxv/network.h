// pxv/network.h

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

// The three network variants and their forward/backward composition.
//
// All variants share one parameter container. A network is a set of TDNN
// frame-layer stacks feeding two heads:
//
//   input --[shared]--+--[speaker_frame]-- stats pool --[segment]-- speakers
//                     |
//                     +--[asr_frame]-- asr_output (per frame) -- senones
//
//   kind            shared   speaker_frame   segment   asr_frame   asr_output
//   kXVector          -        5 (f/)          l/          -           -
//   kAsr              -          -             -         5 (a/)      a/
//   kPhoneticVector   -        5 (f/)          l/        5 (a/)      a/
//   kMultiTask      n (s/)   5-n (fp/)         l/       5-n (ap/)    ap/
//
// In kPhoneticVector the output of the last asr_frame layer (the
// bottleneck) is column-concatenated onto the input of the last
// speaker_frame layer. The senone head of a phonetic-vector network is
// carried along but is not part of the speaker objective.

#ifndef PXV_NETWORK_H_
#define PXV_NETWORK_H_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pxv/kernels.h"
#include "pxv/matrix.h"

namespace pxv {

struct TdnnLayerSpec {
  std::vector<int> offsets;
  std::size_t out_dim = 0;
};

/// The x-vector frame stack: contexts {-2..2}, {-2,0,2}, {-3,0,3}, {0}, {0};
/// widths 512, 512, 512, 512, 1500.
std::vector<TdnnLayerSpec> default_frame_layers();

inline constexpr std::size_t kNumFrameLayers = 5;

struct XVectorConfig {
  std::vector<TdnnLayerSpec> frame_layers = default_frame_layers();
  std::vector<std::size_t> segment_dims = {512, 512};
  std::size_t num_speakers = 0;
  std::size_t feat_dim = 0;

  void validate() const;
  std::size_t pooled_dim() const { return 2 * frame_layers.back().out_dim; }
  std::size_t embedding_dim() const { return segment_dims.front(); }
};

struct AsrConfig {
  std::vector<TdnnLayerSpec> frame_layers;
  std::size_t bottleneck_dim = 128;
  std::size_t num_senones = 0;
  std::size_t feat_dim = 0;

  void validate() const;
};

/// ASR stack reusing the x-vector slicing: `hidden_dim` wide except for a
/// final bottleneck layer.
AsrConfig make_asr_config(const XVectorConfig& x, std::size_t num_senones,
                          std::size_t hidden_dim = 512,
                          std::size_t bottleneck_dim = 128);

struct MtConfig {
  std::size_t shared_layers = 4;
  XVectorConfig x_config;
  std::size_t num_senones = 0;

  void validate() const;
};

enum class NetKind { kXVector, kAsr, kPhoneticVector, kMultiTask };

const char* to_string(NetKind kind);

/// Parameter partition a block belongs to. The serialized name prefix is
/// given in the comment.
enum class Partition {
  kShared,              // "s/"  shared frame layers of a multi-task net
  kSpeakerFrame,        // "fp/" x-vector-only frame layers of a multi-task net
  kSegment,             // "l/"  segment layers and speaker output
  kAsrPrivate,          // "ap/" ASR-only layers and senone output, multi-task
  kAsr,                 // "a/"  standalone or attached ASR network
  kFrame,               // "f/"  x-vector frame layers, baseline and PV
};

const char* partition_prefix(Partition p);

struct TdnnLayer {
  std::vector<int> offsets;
  AffineParams affine;

  bool operator==(const TdnnLayer&) const = default;
};

struct NetworkParams {
  NetKind kind = NetKind::kXVector;
  std::vector<TdnnLayer> shared;
  std::vector<TdnnLayer> speaker_frame;
  std::vector<AffineParams> segment;  // hidden layers, then the speaker output
  std::vector<TdnnLayer> asr_frame;
  std::optional<AffineParams> asr_output;

  bool has_speaker_head() const { return !segment.empty(); }
  bool has_asr_head() const { return asr_output.has_value(); }
  std::size_t input_dim() const;
  std::size_t num_speakers() const;
  std::size_t num_senones() const;
  std::size_t embedding_dim() const;

  bool operator==(const NetworkParams&) const = default;
};

/// Non-owning view of one parameter block (a weight matrix or a bias row).
struct ParamBlock {
  std::string name;
  Partition partition;
  std::size_t rows;
  std::size_t cols;
  std::span<double> values;
};

struct ConstParamBlock {
  std::string name;
  Partition partition;
  std::size_t rows;
  std::size_t cols;
  std::span<const double> values;
};

/// Blocks in a fixed order; two networks of the same structure enumerate
/// corresponding blocks at the same positions.
std::vector<ParamBlock> blocks(NetworkParams& net);
std::vector<ConstParamBlock> blocks(const NetworkParams& net);

/// Same structure, all parameters zero. Used as a gradient accumulator.
NetworkParams zeros_like(const NetworkParams& net);

/// FNV-1a over block names and raw bytes of the selected partitions.
std::uint64_t checksum(const NetworkParams& net,
                       std::initializer_list<Partition> partitions);
std::uint64_t checksum(const NetworkParams& net);

NetworkParams build_xvector(const XVectorConfig& config, std::uint64_t seed);
NetworkParams build_asr(const AsrConfig& config, std::uint64_t seed);
/// Joint network: a copy of `pretrained_asr` attached to freshly initialized
/// x-vector layers.
NetworkParams build_pv_network(const XVectorConfig& x_config,
                               const AsrConfig& asr_config,
                               const NetworkParams& pretrained_asr,
                               std::uint64_t seed);
NetworkParams build_mt_network(const MtConfig& config, std::uint64_t seed);

struct Context {
  int left = 0;   // frames before t
  int right = 0;  // frames after t
};

Context receptive_context(std::span<const TdnnLayerSpec> layers);
/// Context of the frame-level output feeding statistics pooling.
Context speaker_context(const NetworkParams& net);
/// Context of a per-frame senone prediction.
Context phonetic_context(const NetworkParams& net);

/// Speaker posteriors for one utterance (sums to one).
Vector xvector_forward(const NetworkParams& net, const Matrix& features);
Vector speaker_logits(const NetworkParams& net, const Matrix& features);
/// Output of the last frame layer before pooling (T x D).
Matrix frame_level_output(const NetworkParams& net, const Matrix& features);
/// Input of the pooling layer reduced to mean+stddev.
Vector pooled_stats(const NetworkParams& net, const Matrix& features);
/// Pre-activation of the first segment-level affine.
Vector embedding_preactivation(const NetworkParams& net,
                               const Matrix& features);

/// Per-frame senone posteriors (T x num_senones).
Matrix asr_forward(const NetworkParams& net, const Matrix& features);
/// Output of the last ASR frame layer; the bottleneck for an ASR network.
Matrix asr_frame_output(const NetworkParams& net, const Matrix& features);

/// Cross-entropy of one segment and its gradient, added into `grad`
/// (which must have the structure of `net`). Returns the loss.
double speaker_loss_gradient(const NetworkParams& net, const Matrix& features,
                             std::size_t speaker, NetworkParams& grad);
double speaker_loss(const NetworkParams& net, const Matrix& features,
                    std::size_t speaker);

/// Cross-entropy of the senone prediction at row `center` of `window`.
double phonetic_loss_gradient(const NetworkParams& net, const Matrix& window,
                              std::size_t center, std::size_t senone,
                              NetworkParams& grad);
double phonetic_loss(const NetworkParams& net, const Matrix& window,
                     std::size_t center, std::size_t senone);

/// Rows of `utterance` that can influence the prediction at `center` under
/// clamped splicing, i.e. [center-left, center+right] intersected with the
/// utterance. Running the frame stack on this window reproduces the
/// full-utterance output at the center row exactly.
struct Window {
  Matrix frames;
  std::size_t center = 0;
};

Window context_window(const Matrix& utterance, std::size_t center,
                      Context context);

}  // namespace pxv

#endif  // PXV_NETWORK_H_
