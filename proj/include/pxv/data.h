// pxv/data.h

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

// Feature archives, label tables, CMN and segment chunking.
//
// Frames are the unit of length everywhere; at the conventional 100 frames
// per second a 3-15 s segment is 300-1500 frames.

#ifndef PXV_DATA_H_
#define PXV_DATA_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "pxv/matrix.h"

namespace pxv {

using FeatureSequence = Matrix;  // T x D, one row per frame

/// Utterance-id -> features, in insertion order. All utterances share one
/// feature dimension; ids are unique and nonempty.
class FeatureArchive {
 public:
  void add(std::string id, FeatureSequence features);

  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  /// 0 for an empty archive.
  std::size_t dim() const { return feats_.empty() ? 0 : feats_.front().cols(); }

  const std::string& id(std::size_t i) const { return ids_[i]; }
  const FeatureSequence& features(std::size_t i) const { return feats_[i]; }
  FeatureSequence& features(std::size_t i) { return feats_[i]; }
  bool contains(const std::string& id) const { return index_.count(id) != 0; }
  /// Throws DataError for an unknown id.
  const FeatureSequence& at(const std::string& id) const;
  std::optional<std::size_t> find(const std::string& id) const;

  bool operator==(const FeatureArchive& o) const {
    return ids_ == o.ids_ && feats_ == o.feats_;
  }

 private:
  std::vector<std::string> ids_;
  std::vector<FeatureSequence> feats_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline constexpr std::uint32_t kArchiveFormatVersion = 1;

/// PXFA layout (little-endian): "PXFA", u32 version, u64 count, then per
/// utterance u32 id length, id bytes, u64 T, u64 D, T*D f64 row-major.
void write_archive(const FeatureArchive& archive, std::ostream& os);
FeatureArchive read_archive(std::istream& is);
void write_archive(const FeatureArchive& archive, const std::filesystem::path& path);
FeatureArchive read_archive(const std::filesystem::path& path);

struct LabelTable {
  std::unordered_map<std::string, std::size_t> speaker_of;
  /// Per-frame senone indices; absent for utterances without alignment.
  std::unordered_map<std::string, std::vector<std::size_t>> senones_of;

  bool operator==(const LabelTable&) const = default;
};

/// Text, one line per utterance:
///   <utt-id> <speaker-index> <n> <senone_1> ... <senone_n>
/// with n = 0 for utterances without senone labels. Lines are written in
/// the order of `order` (utterances missing from the table are skipped).
void write_labels(const LabelTable& labels, const std::vector<std::string>& order,
                  const std::filesystem::path& path);
LabelTable read_labels(const std::filesystem::path& path);

/// Checks that every archive utterance has a speaker and that senone
/// sequences match frame counts. Throws DataError.
void check_labels(const FeatureArchive& archive, const LabelTable& labels);

/// Per-utterance mean subtraction.
FeatureSequence apply_cmn(const FeatureSequence& features);

struct SpeakerExample {
  FeatureSequence features;
  std::size_t speaker = 0;
  std::string utt_id;
  std::size_t start = 0;  // first frame within the utterance
};

struct ChunkResult {
  std::vector<SpeakerExample> examples;
  std::size_t skipped = 0;  // utterances shorter than min_frames
};

/// Cuts every utterance into consecutive non-overlapping chunks whose
/// lengths lie in [min_frames, max_frames]. Lengths are drawn from a stream
/// keyed by (seed, utterance index). Utterances shorter than min_frames are
/// skipped; a tail shorter than min_frames is dropped.
ChunkResult chunk_segments(const FeatureArchive& archive, const LabelTable& labels,
                           std::size_t min_frames, std::size_t max_frames,
                           std::uint64_t seed);

}  // namespace pxv

#endif  // PXV_DATA_H_
