// src/text_io.cc

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

#include "pxv/text_io.h"

#include <fstream>
#include <functional>

#include "pxv/error.h"
#include "text_io_internal.h"

namespace pxv {
namespace {

using internal::split_fields;
using Fields = std::vector<std::string_view>;

// Calls `fn(fields, lineno)` for each nonblank line.
void for_each_line(const std::filesystem::path& path,
                   const std::function<void(const Fields&, std::uint64_t)>& fn) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  std::string line;
  std::uint64_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const Fields fields = split_fields(line);
    if (!fields.empty()) fn(fields, lineno);
  }
}

FormatError line_error(const std::filesystem::path& path, const std::string& why,
                       std::uint64_t lineno) {
  return FormatError(path.string() + ": " + why, FormatError::Unit::kLine, lineno);
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::trunc | std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  return os;
}

void finish(std::ofstream& os, const std::filesystem::path& path) {
  os.close();
  if (!os) throw IoError("failed writing " + path.string());
}

}  // namespace

std::vector<Trial> read_trials(const std::filesystem::path& path) {
  std::vector<Trial> trials;
  for_each_line(path, [&](const Fields& f, std::uint64_t n) {
    if (f.size() != 3) throw line_error(path, "expected <enroll> <test> <target|nontarget>", n);
    Trial t{std::string(f[0]), std::string(f[1]), false};
    if (f[2] == "target") t.target = true;
    else if (f[2] != "nontarget")
      throw line_error(path, "trial label must be target or nontarget", n);
    trials.push_back(std::move(t));
  });
  return trials;
}

void write_trials(std::span<const Trial> trials, const std::filesystem::path& path) {
  auto os = open_out(path);
  for (const auto& t : trials)
    os << t.enroll << ' ' << t.test << ' ' << (t.target ? "target" : "nontarget") << '\n';
  finish(os, path);
}

std::vector<Score> read_scores(const std::filesystem::path& path) {
  std::vector<Score> scores;
  for_each_line(path, [&](const Fields& f, std::uint64_t n) {
    if (f.size() != 3) throw line_error(path, "expected <enroll> <test> <score>", n);
    const auto v = internal::parse_double(f[2]);
    if (!v) throw line_error(path, "malformed score", n);
    scores.push_back({std::string(f[0]), std::string(f[1]), *v});
  });
  return scores;
}

void write_scores(std::span<const Score> scores, const std::filesystem::path& path) {
  auto os = open_out(path);
  for (const auto& s : scores)
    os << s.enroll << ' ' << s.test << ' ' << internal::format_shortest(s.score) << '\n';
  finish(os, path);
}

void EmbeddingTable::add(std::string id, Vector v) {
  if (id.empty()) throw DataError("embedding table: empty id");
  if (index_.count(id)) throw DataError("embedding table: duplicate id " + id);
  if (!vectors_.empty() && v.size() != dim())
    throw DataError("embedding table: " + id + " has dimension " +
                    std::to_string(v.size()) + ", table has " + std::to_string(dim()));
  index_.emplace(id, ids_.size());
  ids_.push_back(std::move(id));
  vectors_.push_back(std::move(v));
}

const Vector* EmbeddingTable::find(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &vectors_[it->second];
}

EmbeddingTable read_embeddings(const std::filesystem::path& path) {
  EmbeddingTable table;
  for_each_line(path, [&](const Fields& f, std::uint64_t n) {
    if (f.size() < 2) throw line_error(path, "expected <utt-id> <dim> values...", n);
    const auto dim = internal::parse_count(f[1]);
    if (!dim || f.size() != 2 + *dim)
      throw line_error(path, "dimension field does not match value count", n);
    Vector v(*dim);
    for (std::size_t k = 0; k < *dim; ++k) {
      const auto x = internal::parse_double(f[2 + k]);
      if (!x) throw line_error(path, "malformed embedding value", n);
      v[k] = *x;
    }
    try {
      table.add(std::string(f[0]), std::move(v));
    } catch (const DataError& e) {
      throw line_error(path, e.what(), n);
    }
  });
  return table;
}

void write_embeddings(const EmbeddingTable& table, const std::filesystem::path& path) {
  auto os = open_out(path);
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto& v = table.vector(i);
    os << table.id(i) << ' ' << v.size();
    for (double x : v) os << ' ' << internal::format_digits(x, 17);
    os << '\n';
  }
  finish(os, path);
}

std::vector<Enrollment> read_enrollments(const std::filesystem::path& path) {
  std::vector<Enrollment> out;
  for_each_line(path, [&](const Fields& f, std::uint64_t n) {
    if (f.size() < 2) throw line_error(path, "expected <enroll-id> <utt-id>...", n);
    Enrollment e{std::string(f[0]), {}};
    for (std::size_t k = 1; k < f.size(); ++k) e.utterances.emplace_back(f[k]);
    out.push_back(std::move(e));
  });
  return out;
}

void write_enrollments(std::span<const Enrollment> enrollments,
                       const std::filesystem::path& path) {
  auto os = open_out(path);
  for (const auto& e : enrollments) {
    os << e.id;
    for (const auto& u : e.utterances) os << ' ' << u;
    os << '\n';
  }
  finish(os, path);
}

}  // namespace pxv
