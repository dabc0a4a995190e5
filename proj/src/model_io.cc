// src/model_io.cc

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

#include "pxv/model_io.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "binary_io.h"
#include "pxv/error.h"

namespace pxv {
namespace {

constexpr char kMagic[4] = {'P', 'X', 'N', 'M'};
constexpr std::uint32_t kMaxNameLength = 1 << 16;

Matrix row_of(std::span<const double> v) {
  return Matrix::from_rows(1, v.size(), Vector(v.begin(), v.end()));
}

Vector as_vector(const Matrix& m) {
  return Vector(m.values().begin(), m.values().end());
}

std::vector<int> offsets_from(const Matrix& m, const std::string& name) {
  std::vector<int> out;
  for (double v : m.values()) {
    if (v != std::round(v) || std::abs(v) > 1e6)
      throw DataError("model block " + name + " holds a non-integer offset");
    out.push_back(static_cast<int>(v));
  }
  try {
    check_offsets(out);
  } catch (const ArgumentError& e) {
    throw DataError("model block " + name + ": " + e.what());
  }
  return out;
}

AffineParams affine_from(const BlockList& blocks, const std::string& base) {
  AffineParams a{find_block(blocks, base + ".weight"),
                 as_vector(find_block(blocks, base + ".bias"))};
  if (a.bias.size() != a.weight.rows())
    throw DataError("model block " + base + ": bias size " +
                    std::to_string(a.bias.size()) + " vs " +
                    std::to_string(a.weight.rows()) + " outputs");
  return a;
}

bool has_prefix(const BlockList& blocks, const std::string& prefix) {
  return std::any_of(blocks.begin(), blocks.end(), [&](const NamedBlock& b) {
    return b.name.rfind(prefix, 0) == 0;
  });
}

// Indices k of "<prefix>tdnn<k>.weight", ascending.
std::vector<int> layer_indices(const BlockList& blocks, const std::string& prefix) {
  std::set<int> idx;
  const std::string head = prefix + "tdnn";
  const std::string tail = ".weight";
  for (const auto& b : blocks) {
    const auto& n = b.name;
    if (n.rfind(head, 0) != 0 || n.size() <= head.size() + tail.size()) continue;
    if (n.compare(n.size() - tail.size(), tail.size(), tail) != 0) continue;
    const std::string digits =
        n.substr(head.size(), n.size() - head.size() - tail.size());
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit))
      continue;
    idx.insert(std::stoi(digits));
  }
  return {idx.begin(), idx.end()};
}

std::vector<TdnnLayer> stack_from(const BlockList& blocks, const std::string& prefix,
                                  int expected_first) {
  std::vector<TdnnLayer> layers;
  int expect = expected_first;
  for (int k : layer_indices(blocks, prefix)) {
    if (k != expect)
      throw DataError("model: missing layer " + prefix + "tdnn" + std::to_string(expect));
    const std::string base = prefix + "tdnn" + std::to_string(k);
    TdnnLayer l;
    l.offsets = offsets_from(find_block(blocks, base + ".offsets"), base + ".offsets");
    l.affine = affine_from(blocks, base);
    layers.push_back(std::move(l));
    ++expect;
  }
  return layers;
}

// Input width of each layer must be (previous width [+ aux]) * |offsets|.
void check_chain(const std::vector<TdnnLayer>& layers, std::size_t in_dim,
                 std::size_t aux_dim, const char* what) {
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const std::size_t cols =
        (in_dim + (k + 1 == layers.size() ? aux_dim : 0)) * layers[k].offsets.size();
    if (layers[k].affine.in_dim() != cols)
      throw DataError(std::string("model: ") + what + " layer " +
                      std::to_string(k + 1) + " takes " +
                      std::to_string(layers[k].affine.in_dim()) +
                      " inputs, expected " + std::to_string(cols));
    in_dim = layers[k].affine.out_dim();
  }
}

}  // namespace

void write_blocks(const BlockList& blocks, std::ostream& os) {
  internal::LeWriter w(os);
  w.bytes(kMagic, 4);
  w.put<std::uint32_t>(kModelFormatVersion);
  w.put<std::uint64_t>(blocks.size());
  for (const auto& b : blocks) {
    w.put<std::uint32_t>(static_cast<std::uint32_t>(b.name.size()));
    w.bytes(b.name.data(), b.name.size());
    w.put<std::uint64_t>(b.value.rows());
    w.put<std::uint64_t>(b.value.cols());
    w.doubles(b.value.values());
  }
  if (!os) throw IoError("failed writing model block stream");
}

BlockList read_blocks(std::istream& is) {
  internal::LeReader r(is);
  char magic[4];
  r.bytes(magic, 4, "magic");
  if (!std::equal(magic, magic + 4, kMagic))
    throw FormatError("bad magic, not a PXNM model file", FormatError::Unit::kByte, 0);
  const auto version_at = r.offset();
  const auto version = r.get<std::uint32_t>("version");
  if (version != kModelFormatVersion)
    throw FormatError("unsupported PXNM version " + std::to_string(version),
                      FormatError::Unit::kByte, version_at);
  const auto count = r.get<std::uint64_t>("block count");
  BlockList blocks;
  std::set<std::string> seen;
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto name_at = r.offset();
    const auto len = r.get<std::uint32_t>("name length");
    if (len == 0 || len > kMaxNameLength)
      throw FormatError("invalid block name length " + std::to_string(len),
                        FormatError::Unit::kByte, name_at);
    std::string name(len, '\0');
    r.bytes(name.data(), len, "block name");
    if (!seen.insert(name).second)
      throw FormatError("duplicate block " + name, FormatError::Unit::kByte, name_at);
    const auto dims_at = r.offset();
    const auto rows = r.get<std::uint64_t>("rows");
    const auto cols = r.get<std::uint64_t>("cols");
    if (rows != 0 && cols > (std::uint64_t{1} << 40) / rows)
      throw FormatError("block " + name + " is implausibly large",
                        FormatError::Unit::kByte, dims_at);
    Matrix m(rows, cols);
    r.doubles(m.values(), "block values");
    blocks.push_back({std::move(name), std::move(m)});
  }
  if (!r.at_eof())
    throw FormatError("trailing bytes after last block", FormatError::Unit::kByte,
                      r.offset());
  return blocks;
}

void write_blocks(const BlockList& blocks, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  write_blocks(blocks, os);
  os.close();
  if (!os) throw IoError("failed writing " + path.string());
}

BlockList read_blocks(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  return read_blocks(is);
}

const Matrix& find_block(const BlockList& blocks, const std::string& name) {
  for (const auto& b : blocks)
    if (b.name == name) return b.value;
  throw DataError("model block " + name + " not found");
}

BlockList to_blocks(const NetworkParams& net) {
  BlockList out;
  // Offsets ride along with each layer's weight so a file is self-describing.
  std::map<std::string, const std::vector<int>*> offsets;
  const bool mt = net.kind == NetKind::kMultiTask;
  auto note = [&](const std::vector<TdnnLayer>& layers, Partition p, std::size_t first) {
    for (std::size_t k = 0; k < layers.size(); ++k)
      offsets[std::string(partition_prefix(p)) + "tdnn" + std::to_string(first + k)] =
          &layers[k].offsets;
  };
  const std::size_t base = net.shared.size() + 1;
  note(net.shared, Partition::kShared, 1);
  note(net.speaker_frame, mt ? Partition::kSpeakerFrame : Partition::kFrame, base);
  note(net.asr_frame, mt ? Partition::kAsrPrivate : Partition::kAsr, base);

  for (const auto& b : blocks(net)) {
    out.push_back({b.name, Matrix::from_rows(b.rows, b.cols,
                                             Vector(b.values.begin(), b.values.end()))});
    const std::string suffix = ".bias";
    if (b.name.size() > suffix.size() &&
        b.name.compare(b.name.size() - suffix.size(), suffix.size(), suffix) == 0) {
      const std::string layer = b.name.substr(0, b.name.size() - suffix.size());
      if (auto it = offsets.find(layer); it != offsets.end()) {
        Vector v(it->second->begin(), it->second->end());
        out.push_back({layer + ".offsets", row_of(v)});
      }
    }
  }
  return out;
}

NetworkParams from_blocks(const BlockList& blocks) {
  NetworkParams net;
  const bool has_s = has_prefix(blocks, "s/");
  const bool has_a = has_prefix(blocks, "a/");
  const bool has_f = has_prefix(blocks, "f/");
  if (has_s) {
    net.kind = NetKind::kMultiTask;
    net.shared = stack_from(blocks, "s/", 1);
    const int base = static_cast<int>(net.shared.size()) + 1;
    net.speaker_frame = stack_from(blocks, "fp/", base);
    net.asr_frame = stack_from(blocks, "ap/", base);
    net.asr_output = affine_from(blocks, "ap/output");
  } else if (has_a && has_f) {
    net.kind = NetKind::kPhoneticVector;
    net.asr_frame = stack_from(blocks, "a/", 1);
    net.asr_output = affine_from(blocks, "a/output");
    net.speaker_frame = stack_from(blocks, "f/", 1);
  } else if (has_a) {
    net.kind = NetKind::kAsr;
    net.asr_frame = stack_from(blocks, "a/", 1);
    net.asr_output = affine_from(blocks, "a/output");
  } else if (has_f) {
    net.kind = NetKind::kXVector;
    net.speaker_frame = stack_from(blocks, "f/", 1);
  } else {
    throw DataError("model file holds no network parameters");
  }
  if (net.kind != NetKind::kAsr) {
    for (int k = 1;; ++k) {
      const std::string base = "l/segment" + std::to_string(k);
      if (!has_prefix(blocks, base + ".")) break;
      net.segment.push_back(affine_from(blocks, base));
    }
    net.segment.push_back(affine_from(blocks, "l/output"));
  }

  // Structural consistency.
  const std::size_t in = net.input_dim();
  if (in == 0) throw DataError("model has no frame layers");
  check_chain(net.shared, in, 0, "shared");
  const std::size_t trunk =
      net.shared.empty() ? in : net.shared.back().affine.out_dim();
  check_chain(net.asr_frame, trunk, 0, "ASR");
  const std::size_t aux = net.kind == NetKind::kPhoneticVector
                              ? net.asr_frame.back().affine.out_dim()
                              : 0;
  check_chain(net.speaker_frame, trunk, aux, "speaker");
  if (net.has_speaker_head()) {
    const std::size_t frame_dim = net.speaker_frame.empty()
                                      ? trunk
                                      : net.speaker_frame.back().affine.out_dim();
    std::size_t d = 2 * frame_dim;
    for (const auto& a : net.segment) {
      if (a.in_dim() != d)
        throw DataError("model: segment layer input " + std::to_string(a.in_dim()) +
                        ", expected " + std::to_string(d));
      d = a.out_dim();
    }
  }
  if (net.asr_output) {
    const std::size_t h = net.asr_frame.empty() ? trunk
                                                : net.asr_frame.back().affine.out_dim();
    if (net.asr_output->in_dim() != h)
      throw DataError("model: senone output takes " +
                      std::to_string(net.asr_output->in_dim()) + " inputs, expected " +
                      std::to_string(h));
  }
  return net;
}

void save_network(const NetworkParams& net, const std::filesystem::path& path) {
  write_blocks(to_blocks(net), path);
}

NetworkParams load_network(const std::filesystem::path& path) {
  return from_blocks(read_blocks(path));
}

}  // namespace pxv
