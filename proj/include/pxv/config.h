// pxv/config.h

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

// Run configuration: "key = value" lines, "#" starts a comment, keys are
// dotted (train.lr). Every key must appear in the schema below; values are
// type-checked at parse time.

#ifndef PXV_CONFIG_H_
#define PXV_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pxv {

enum class ValueType { kString, kPath, kCount, kU64, kReal, kBool, kCountList };

struct ConfigKey {
  std::string_view name;
  ValueType type;
  std::optional<std::string_view> default_value;  // nullopt: required when read
  std::string_view help;
};

/// The complete schema.
const std::vector<ConfigKey>& config_schema();

class RunConfig {
 public:
  /// Parses and validates; throws ConfigError naming the line.
  static RunConfig parse(std::string_view text);
  static RunConfig load(const std::filesystem::path& path);

  /// Sets or replaces a value after type checking.
  void set(std::string_view key, std::string_view value);
  bool has(std::string_view key) const;

  /// Typed getters fall back to the schema default and throw ConfigError
  /// "missing required key '<key>'" when neither exists. Relative paths are
  /// resolved against the config file's directory.
  std::string get_string(std::string_view key) const;
  std::filesystem::path get_path(std::string_view key) const;
  std::size_t get_count(std::string_view key) const;
  std::uint64_t get_u64(std::string_view key) const;
  double get_real(std::string_view key) const;
  bool get_bool(std::string_view key) const;
  std::vector<std::size_t> get_count_list(std::string_view key) const;

  /// Throws the missing-key error for the first absent key without default.
  void require(std::initializer_list<std::string_view> keys) const;

 private:
  std::string raw(std::string_view key) const;

  std::map<std::string, std::string, std::less<>> values_;
  std::filesystem::path base_dir_;
};

}  // namespace pxv

#endif  // PXV_CONFIG_H_
