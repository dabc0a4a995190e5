// pxv/text_io.h

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

// Text formats: trial lists, score files, embedding tables, enrollment maps.
// All files are UTF-8 with "\n" line endings; fields are separated by
// single spaces on output and by any run of blanks on input.

#ifndef PXV_TEXT_IO_H_
#define PXV_TEXT_IO_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "pxv/matrix.h"

namespace pxv {

/// "<enroll-id> <test-id> <target|nontarget>"
struct Trial {
  std::string enroll;
  std::string test;
  bool target = false;

  bool operator==(const Trial&) const = default;
};

std::vector<Trial> read_trials(const std::filesystem::path& path);
void write_trials(std::span<const Trial> trials, const std::filesystem::path& path);

/// "<enroll-id> <test-id> <score>", score in shortest round-trip decimal.
struct Score {
  std::string enroll;
  std::string test;
  double score = 0.0;

  bool operator==(const Score&) const = default;
};

std::vector<Score> read_scores(const std::filesystem::path& path);
void write_scores(std::span<const Score> scores, const std::filesystem::path& path);

/// "<utt-id> <dim> v1 ... vdim", 17 significant digits.
class EmbeddingTable {
 public:
  void add(std::string id, Vector v);
  std::size_t size() const { return ids_.size(); }
  std::size_t dim() const { return vectors_.empty() ? 0 : vectors_.front().size(); }
  const std::string& id(std::size_t i) const { return ids_[i]; }
  const Vector& vector(std::size_t i) const { return vectors_[i]; }
  const std::vector<Vector>& vectors() const { return vectors_; }
  const Vector* find(const std::string& id) const;

  bool operator==(const EmbeddingTable& o) const {
    return ids_ == o.ids_ && vectors_ == o.vectors_;
  }

 private:
  std::vector<std::string> ids_;
  std::vector<Vector> vectors_;
  std::unordered_map<std::string, std::size_t> index_;
};

EmbeddingTable read_embeddings(const std::filesystem::path& path);
void write_embeddings(const EmbeddingTable& table, const std::filesystem::path& path);

/// "<enroll-id> <utt-id> [<utt-id> ...]": the utterances of one enrollment.
struct Enrollment {
  std::string id;
  std::vector<std::string> utterances;

  bool operator==(const Enrollment&) const = default;
};

std::vector<Enrollment> read_enrollments(const std::filesystem::path& path);
void write_enrollments(std::span<const Enrollment> enrollments,
                       const std::filesystem::path& path);

}  // namespace pxv

#endif  // PXV_TEXT_IO_H_
