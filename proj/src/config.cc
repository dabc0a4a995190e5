// src/config.cc

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

#include "pxv/config.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "pxv/error.h"
#include "text_io_internal.h"

namespace pxv {
namespace {

using VT = ValueType;

std::string_view trim(std::string_view s) {
  const auto blank = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && blank(s.front())) s.remove_prefix(1);
  while (!s.empty() && blank(s.back())) s.remove_suffix(1);
  return s;
}

const ConfigKey* lookup(std::string_view key) {
  const auto& schema = config_schema();
  auto it = std::find_if(schema.begin(), schema.end(),
                         [&](const ConfigKey& k) { return k.name == key; });
  return it == schema.end() ? nullptr : &*it;
}

std::optional<std::vector<std::size_t>> parse_list(std::string_view s) {
  std::vector<std::size_t> out;
  while (true) {
    const auto comma = s.find(',');
    const auto item = internal::parse_count(trim(s.substr(0, comma)));
    if (!item) return std::nullopt;
    out.push_back(*item);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

// Empty string when `value` is acceptable for `type`, else the reason.
std::string type_problem(VT type, std::string_view value) {
  switch (type) {
    case VT::kString:
    case VT::kPath:
      return value.empty() ? "empty value" : "";
    case VT::kCount:
    case VT::kU64:
      return internal::parse_count(value) ? "" : "expected a non-negative integer";
    case VT::kReal:
      return internal::parse_double(value) ? "" : "expected a finite real number";
    case VT::kBool:
      return value == "true" || value == "false" ? "" : "expected true or false";
    case VT::kCountList:
      return parse_list(value) ? "" : "expected a comma-separated list of integers";
  }
  return "unknown type";
}

}  // namespace

const std::vector<ConfigKey>& config_schema() {
  static const std::vector<ConfigKey> schema = {
      {"seed", VT::kU64, "0", "master seed; --seed overrides"},

      {"synth.num_speakers", VT::kCount, std::nullopt, "training speakers"},
      {"synth.num_senones", VT::kCount, std::nullopt, "senone inventory size"},
      {"synth.feat_dim", VT::kCount, std::nullopt, "feature dimension"},
      {"synth.utts_per_speaker", VT::kCount, "15", "training utterances per speaker"},
      {"synth.min_frames", VT::kCount, "200", "shortest utterance"},
      {"synth.max_frames", VT::kCount, "400", "longest utterance"},
      {"synth.speaker_scale", VT::kReal, "1.0", "weight of the speaker vector"},
      {"synth.senone_scale", VT::kReal, "1.0", "weight of the senone vector"},
      {"synth.noise_scale", VT::kReal, "0.5", "weight of the frame noise"},
      {"synth.eval_speakers", VT::kCount, "0", "held-out evaluation speakers (0: none)"},
      {"synth.eval_utts_per_speaker", VT::kCount, "13", "utterances per evaluation speaker"},
      {"synth.enroll_per_speaker", VT::kCount, "3", "enrollment utterances per speaker"},

      {"data.cmn", VT::kBool, "false", "per-utterance mean normalization"},
      {"data.min_chunk", VT::kCount, "200", "shortest training segment (frames)"},
      {"data.max_chunk", VT::kCount, "400", "longest training segment (frames)"},
      {"data.valid_segments", VT::kCount, "100", "segments held out for validation"},
      {"data.phonetic_stride", VT::kCount, "1", "use every n-th labelled frame"},

      {"model.frame_dims", VT::kCountList, "512,512,512,512,1500", "frame layer widths"},
      {"model.segment_dims", VT::kCountList, "512,512", "segment layer widths"},
      {"model.asr_hidden", VT::kCount, "512", "ASR hidden width"},
      {"model.bottleneck", VT::kCount, "128", "ASR bottleneck width"},

      {"train.variant", VT::kString, "baseline", "baseline, pv or mt-1 ... mt-5"},
      {"train.lr", VT::kReal, "0.01", "learning rate"},
      {"train.asr_lr_scale", VT::kReal, "0.2", "PV learning-rate factor for the ASR layers"},
      {"train.speaker_batch", VT::kCount, "64", "speaker mini-batch"},
      {"train.phonetic_batch", VT::kCount, "256", "phonetic mini-batch"},
      {"train.epochs", VT::kCount, "5", "speaker training epochs"},
      {"train.asr_epochs", VT::kCount, "5", "ASR pretraining epochs"},
      {"train.asr_lr", VT::kReal, "0.01", "ASR pretraining learning rate"},
      {"train.pretrain_asr", VT::kBool, "false", "pv: pretrain instead of loading"},
      {"train.tag", VT::kString, std::nullopt, "checkpoint name stem (default: variant)"},

      {"backend.lda_dim", VT::kCount, "150", "LDA output dimension"},
      {"backend.plda_iters", VT::kCount, "10", "PLDA EM iterations"},

      {"eval.dcf08_c_miss", VT::kReal, "10", "SRE08 miss cost"},
      {"eval.dcf08_c_fa", VT::kReal, "1", "SRE08 false-alarm cost"},
      {"eval.dcf08_p_target", VT::kReal, "0.01", "SRE08 target prior"},
      {"eval.dcf10_c_miss", VT::kReal, "1", "SRE10 miss cost"},
      {"eval.dcf10_c_fa", VT::kReal, "1", "SRE10 false-alarm cost"},
      {"eval.dcf10_p_target", VT::kReal, "0.001", "SRE10 target prior"},

      {"paths.train_archive", VT::kPath, std::nullopt, "training features (PXFA)"},
      {"paths.train_labels", VT::kPath, std::nullopt, "training labels"},
      {"paths.eval_archive", VT::kPath, std::nullopt, "evaluation features (PXFA)"},
      {"paths.eval_labels", VT::kPath, std::nullopt, "evaluation labels"},
      {"paths.trials", VT::kPath, std::nullopt, "trial list"},
      {"paths.enroll", VT::kPath, std::nullopt, "enrollment map"},
      {"paths.asr_model", VT::kPath, std::nullopt, "pretrained ASR network (PXNM)"},
      {"paths.model", VT::kPath, std::nullopt, "speaker network (PXNM)"},
      {"paths.train_log", VT::kPath, std::nullopt, "per-epoch training log"},
      {"paths.checkpoint_dir", VT::kPath, std::nullopt, "per-epoch checkpoints"},
      {"paths.train_embeddings", VT::kPath, std::nullopt, "embeddings of training data"},
      {"paths.eval_embeddings", VT::kPath, std::nullopt, "embeddings of evaluation data"},
      {"paths.backend", VT::kPath, std::nullopt, "LDA+PLDA model (PXNM)"},
      {"paths.scores", VT::kPath, std::nullopt, "trial scores"},
      {"paths.report", VT::kPath, std::nullopt, "metrics report"},
      {"paths.det", VT::kPath, std::nullopt, "DET points (CSV)"},
  };
  return schema;
}

RunConfig RunConfig::parse(std::string_view text) {
  RunConfig cfg;
  std::size_t lineno = 0;
  while (!text.empty()) {
    ++lineno;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const auto where = "config line " + std::to_string(lineno) + ": ";
    if (eq == std::string_view::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string_view key = trim(line.substr(0, eq));
    if (cfg.values_.count(key))
      throw ConfigError(where + "duplicate key '" + std::string(key) + "'");
    try {
      cfg.set(key, trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  RunConfig cfg = parse(ss.str());
  cfg.base_dir_ = path.parent_path();
  return cfg;
}

void RunConfig::set(std::string_view key, std::string_view value) {
  const ConfigKey* k = lookup(key);
  if (!k) throw ConfigError("unknown key '" + std::string(key) + "'");
  const std::string problem = type_problem(k->type, value);
  if (!problem.empty())
    throw ConfigError("key '" + std::string(key) + "': " + problem + ", got '" +
                      std::string(value) + "'");
  values_[std::string(key)] = std::string(value);
}

bool RunConfig::has(std::string_view key) const { return values_.count(key) != 0; }

std::string RunConfig::raw(std::string_view key) const {
  auto it = values_.find(key);
  if (it != values_.end()) return it->second;
  const ConfigKey* k = lookup(key);
  if (!k) throw ConfigError("unknown key '" + std::string(key) + "'");
  if (!k->default_value) throw ConfigError("missing required key '" + std::string(key) + "'");
  return std::string(*k->default_value);
}

void RunConfig::require(std::initializer_list<std::string_view> keys) const {
  for (auto key : keys) raw(key);
}

std::string RunConfig::get_string(std::string_view key) const { return raw(key); }

std::filesystem::path RunConfig::get_path(std::string_view key) const {
  std::filesystem::path p = raw(key);
  return p.is_relative() && !base_dir_.empty() ? base_dir_ / p : p;
}

std::size_t RunConfig::get_count(std::string_view key) const {
  return *internal::parse_count(raw(key));
}

std::uint64_t RunConfig::get_u64(std::string_view key) const {
  return *internal::parse_count(raw(key));
}

double RunConfig::get_real(std::string_view key) const {
  return *internal::parse_double(raw(key));
}

bool RunConfig::get_bool(std::string_view key) const { return raw(key) == "true"; }

std::vector<std::size_t> RunConfig::get_count_list(std::string_view key) const {
  return *parse_list(raw(key));
}

}  // namespace pxv
