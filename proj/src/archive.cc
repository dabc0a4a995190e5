// src/archive.cc

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

#include <algorithm>
#include <fstream>
#include <sstream>

#include "binary_io.h"
#include "pxv/data.h"
#include "pxv/error.h"
#include "pxv/rng.h"
#include "text_io_internal.h"

namespace pxv {
namespace {

constexpr char kMagic[4] = {'P', 'X', 'F', 'A'};

}  // namespace

void FeatureArchive::add(std::string id, FeatureSequence features) {
  if (id.empty()) throw DataError("archive: empty utterance id");
  if (index_.count(id)) throw DataError("archive: duplicate utterance id " + id);
  if (!feats_.empty() && features.cols() != dim())
    throw DataError("archive: utterance " + id + " has dimension " +
                    std::to_string(features.cols()) + ", archive has " +
                    std::to_string(dim()));
  index_.emplace(id, ids_.size());
  ids_.push_back(std::move(id));
  feats_.push_back(std::move(features));
}

const FeatureSequence& FeatureArchive::at(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw DataError("archive: unknown utterance " + id);
  return feats_[it->second];
}

std::optional<std::size_t> FeatureArchive::find(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void write_archive(const FeatureArchive& archive, std::ostream& os) {
  internal::LeWriter w(os);
  w.bytes(kMagic, 4);
  w.put<std::uint32_t>(kArchiveFormatVersion);
  w.put<std::uint64_t>(archive.size());
  for (std::size_t i = 0; i < archive.size(); ++i) {
    const auto& id = archive.id(i);
    const auto& f = archive.features(i);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(id.size()));
    w.bytes(id.data(), id.size());
    w.put<std::uint64_t>(f.rows());
    w.put<std::uint64_t>(f.cols());
    w.doubles(f.values());
  }
  if (!os) throw IoError("failed writing feature archive stream");
}

FeatureArchive read_archive(std::istream& is) {
  using Unit = FormatError::Unit;
  internal::LeReader r(is);
  char magic[4];
  r.bytes(magic, 4, "magic");
  if (!std::equal(magic, magic + 4, kMagic))
    throw FormatError("bad magic, not a PXFA feature archive", Unit::kByte, 0);
  const auto version_at = r.offset();
  const auto version = r.get<std::uint32_t>("version");
  if (version != kArchiveFormatVersion)
    throw FormatError("unsupported PXFA version " + std::to_string(version),
                      Unit::kByte, version_at);
  const auto count = r.get<std::uint64_t>("utterance count");
  FeatureArchive archive;
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto id_at = r.offset();
    const auto len = r.get<std::uint32_t>("id length");
    if (len == 0 || len > (1u << 16))
      throw FormatError("invalid utterance id length " + std::to_string(len),
                        Unit::kByte, id_at);
    std::string id(len, '\0');
    r.bytes(id.data(), len, "utterance id");
    if (archive.contains(id))
      throw FormatError("duplicate utterance id " + id, Unit::kByte, id_at);
    const auto dims_at = r.offset();
    const auto rows = r.get<std::uint64_t>("frame count");
    const auto cols = r.get<std::uint64_t>("feature dimension");
    if (rows != 0 && cols > (std::uint64_t{1} << 36) / rows)
      throw FormatError("utterance " + id + " is implausibly large", Unit::kByte, dims_at);
    if (!archive.empty() && cols != archive.dim())
      throw FormatError("utterance " + id + " has dimension " + std::to_string(cols) +
                            ", archive has " + std::to_string(archive.dim()),
                        Unit::kByte, dims_at);
    Matrix m(rows, cols);
    r.doubles(m.values(), "feature values");
    archive.add(std::move(id), std::move(m));
  }
  if (!r.at_eof())
    throw FormatError("trailing bytes after last utterance", Unit::kByte, r.offset());
  return archive;
}

void write_archive(const FeatureArchive& archive, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  write_archive(archive, os);
  os.close();
  if (!os) throw IoError("failed writing " + path.string());
}

FeatureArchive read_archive(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  return read_archive(is);
}

void write_labels(const LabelTable& labels, const std::vector<std::string>& order,
                  const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  for (const auto& id : order) {
    auto spk = labels.speaker_of.find(id);
    if (spk == labels.speaker_of.end()) continue;
    os << id << ' ' << spk->second;
    auto sen = labels.senones_of.find(id);
    if (sen == labels.senones_of.end()) {
      os << " 0";
    } else {
      os << ' ' << sen->second.size();
      for (std::size_t s : sen->second) os << ' ' << s;
    }
    os << '\n';
  }
  os.close();
  if (!os) throw IoError("failed writing " + path.string());
}

LabelTable read_labels(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  LabelTable labels;
  std::string line;
  std::uint64_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto fields = internal::split_fields(line);
    if (fields.empty()) continue;
    auto bad = [&](const std::string& why) {
      return FormatError("label file " + path.string() + ": " + why,
                         FormatError::Unit::kLine, lineno);
    };
    if (fields.size() < 3) throw bad("expected <utt-id> <speaker> <n> ...");
    const std::string id(fields[0]);
    const auto speaker = internal::parse_count(fields[1]);
    const auto n = internal::parse_count(fields[2]);
    if (!speaker || !n) throw bad("malformed speaker index or senone count");
    if (fields.size() != 3 + *n) throw bad("senone count does not match line length");
    if (!labels.speaker_of.emplace(id, *speaker).second)
      throw bad("duplicate utterance " + id);
    if (*n > 0) {
      std::vector<std::size_t> senones;
      senones.reserve(*n);
      for (std::size_t k = 0; k < *n; ++k) {
        const auto s = internal::parse_count(fields[3 + k]);
        if (!s) throw bad("malformed senone index");
        senones.push_back(*s);
      }
      labels.senones_of.emplace(id, std::move(senones));
    }
  }
  return labels;
}

void check_labels(const FeatureArchive& archive, const LabelTable& labels) {
  for (std::size_t i = 0; i < archive.size(); ++i) {
    const auto& id = archive.id(i);
    if (!labels.speaker_of.count(id))
      throw DataError("no speaker label for utterance " + id);
    auto it = labels.senones_of.find(id);
    if (it != labels.senones_of.end() &&
        it->second.size() != archive.features(i).rows())
      throw DataError("utterance " + id + " has " +
                      std::to_string(archive.features(i).rows()) + " frames but " +
                      std::to_string(it->second.size()) + " senone labels");
  }
}

FeatureSequence apply_cmn(const FeatureSequence& features) {
  if (features.rows() == 0) throw ShapeError("apply_cmn: no frames");
  const std::size_t T = features.rows(), D = features.cols();
  Vector mean(D, 0.0);
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t d = 0; d < D; ++d) mean[d] += features(t, d);
  for (double& m : mean) m /= static_cast<double>(T);
  FeatureSequence out(T, D);
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t d = 0; d < D; ++d) out(t, d) = features(t, d) - mean[d];
  return out;
}

ChunkResult chunk_segments(const FeatureArchive& archive, const LabelTable& labels,
                           std::size_t min_frames, std::size_t max_frames,
                           std::uint64_t seed) {
  if (min_frames == 0 || min_frames > max_frames)
    throw ArgumentError("chunk_segments: need 1 <= min_frames <= max_frames");
  ChunkResult result;
  for (std::size_t u = 0; u < archive.size(); ++u) {
    const auto& id = archive.id(u);
    const auto& feats = archive.features(u);
    auto spk = labels.speaker_of.find(id);
    if (spk == labels.speaker_of.end())
      throw DataError("no speaker label for utterance " + id);
    if (feats.rows() < min_frames) {
      ++result.skipped;
      continue;
    }
    Rng rng(derive_seed(seed, "chunk", u));
    std::size_t pos = 0, remaining = feats.rows();
    while (remaining >= min_frames) {
      std::size_t len;
      if (remaining <= max_frames) {
        len = remaining;
      } else if (remaining - min_frames >= min_frames) {
        const std::size_t hi = std::min(max_frames, remaining - min_frames);
        len = min_frames + rng.uniform_int(hi - min_frames + 1);
      } else {
        len = max_frames;
      }
      SpeakerExample ex;
      ex.features = Matrix(len, feats.cols());
      std::copy(feats.data() + pos * feats.cols(),
                feats.data() + (pos + len) * feats.cols(), ex.features.data());
      ex.speaker = spk->second;
      ex.utt_id = id;
      ex.start = pos;
      result.examples.push_back(std::move(ex));
      pos += len;
      remaining -= len;
    }
  }
  return result;
}

}  // namespace pxv
