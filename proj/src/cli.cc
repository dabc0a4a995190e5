// src/cli.cc

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

#include "pxv/cli.h"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "pxv/backend.h"
#include "pxv/config.h"
#include "pxv/data.h"
#include "pxv/error.h"
#include "pxv/log.h"
#include "pxv/metrics.h"
#include "pxv/model_io.h"
#include "pxv/network.h"
#include "pxv/rng.h"
#include "pxv/synth.h"
#include "pxv/train.h"

namespace pxv {
namespace {

namespace fs = std::filesystem;

std::string hex(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::trunc | std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << text;
  os.close();
  if (!os) throw IoError("failed writing " + path.string());
}

// Called once inputs are validated, right before the first write.
void make_parent_dirs(std::initializer_list<fs::path> outputs) {
  for (const auto& p : outputs)
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

void require_file(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw IoError("missing input file " + path.string());
}

// ---------------------------------------------------------------------------
// Config translation

SynthConfig train_synth_config(const RunConfig& cfg, std::uint64_t seed) {
  SynthConfig s;
  s.num_speakers = cfg.get_count("synth.num_speakers");
  s.num_senones = cfg.get_count("synth.num_senones");
  s.feat_dim = cfg.get_count("synth.feat_dim");
  s.utts_per_speaker = cfg.get_count("synth.utts_per_speaker");
  s.min_frames = cfg.get_count("synth.min_frames");
  s.max_frames = cfg.get_count("synth.max_frames");
  s.speaker_scale = cfg.get_real("synth.speaker_scale");
  s.senone_scale = cfg.get_real("synth.senone_scale");
  s.noise_scale = cfg.get_real("synth.noise_scale");
  s.seed = seed;
  s.validate();
  return s;
}

TrainConfig train_config(const RunConfig& cfg, std::uint64_t seed,
                         const std::optional<std::string>& variant) {
  TrainConfig t;
  t.lr = cfg.get_real("train.lr");
  t.asr_lr_scale = cfg.get_real("train.asr_lr_scale");
  t.speaker_batch = cfg.get_count("train.speaker_batch");
  t.phonetic_batch = cfg.get_count("train.phonetic_batch");
  t.epochs = cfg.get_count("train.epochs");
  t.seed = seed;
  parse_variant(variant ? *variant : cfg.get_string("train.variant"), t);
  t.validate();
  return t;
}

XVectorConfig xvector_config(const RunConfig& cfg, std::size_t num_speakers,
                             std::size_t feat_dim) {
  XVectorConfig x;
  const auto dims = cfg.get_count_list("model.frame_dims");
  if (dims.size() != x.frame_layers.size())
    throw ConfigError("model.frame_dims must list " + std::to_string(x.frame_layers.size()) +
                      " widths");
  for (std::size_t k = 0; k < dims.size(); ++k) x.frame_layers[k].out_dim = dims[k];
  x.segment_dims = cfg.get_count_list("model.segment_dims");
  x.num_speakers = num_speakers;
  x.feat_dim = feat_dim;
  x.validate();
  return x;
}

DcfParams dcf(const RunConfig& cfg, const std::string& which) {
  DcfParams p{cfg.get_real("eval." + which + "_c_miss"), cfg.get_real("eval." + which + "_c_fa"),
              cfg.get_real("eval." + which + "_p_target")};
  p.validate();
  return p;
}

// ---------------------------------------------------------------------------
// Shared loading

struct LabelledArchive {
  FeatureArchive archive;
  LabelTable labels;
};

LabelledArchive load_labelled(const fs::path& archive, const fs::path& labels, bool cmn) {
  require_file(archive);
  require_file(labels);
  LabelledArchive la{read_archive(archive), read_labels(labels)};
  check_labels(la.archive, la.labels);
  if (cmn)
    for (std::size_t i = 0; i < la.archive.size(); ++i)
      la.archive.features(i) = apply_cmn(la.archive.features(i));
  return la;
}

std::size_t count_speakers(const LabelTable& labels) {
  std::size_t k = 0;
  for (const auto& [id, spk] : labels.speaker_of) k = std::max(k, spk + 1);
  return k;
}

std::size_t count_senones(const LabelTable& labels) {
  std::size_t k = 0;
  for (const auto& [id, seq] : labels.senones_of)
    for (std::size_t s : seq) k = std::max(k, s + 1);
  return k;
}

EmbeddingTable load_embeddings(const fs::path& path) {
  require_file(path);
  return read_embeddings(path);
}

// ---------------------------------------------------------------------------
// Commands

void cmd_synth(const RunConfig& cfg, std::uint64_t seed, std::ostream& out) {
  const SynthConfig train = train_synth_config(cfg, seed);
  const fs::path train_archive = cfg.get_path("paths.train_archive");
  const fs::path train_labels = cfg.get_path("paths.train_labels");
  const std::size_t eval_speakers = cfg.get_count("synth.eval_speakers");
  std::optional<SynthConfig> eval;
  fs::path eval_archive, eval_labels, trials, enroll;
  std::size_t enroll_per_speaker = 0;
  if (eval_speakers > 0) {
    eval = train;
    eval->num_speakers = eval_speakers;
    eval->utts_per_speaker = cfg.get_count("synth.eval_utts_per_speaker");
    eval->speaker_seed = derive_seed(seed, "eval-speakers");
    eval->id_prefix = "eval-";
    eval->validate();
    enroll_per_speaker = cfg.get_count("synth.enroll_per_speaker");
    if (enroll_per_speaker == 0 || enroll_per_speaker >= eval->utts_per_speaker)
      throw ConfigError("synth.enroll_per_speaker must lie in [1, eval_utts_per_speaker)");
    eval_archive = cfg.get_path("paths.eval_archive");
    eval_labels = cfg.get_path("paths.eval_labels");
    trials = cfg.get_path("paths.trials");
    enroll = cfg.get_path("paths.enroll");
  }

  const SynthCorpus corpus = synth_generate(train);
  make_parent_dirs({train_archive, train_labels});
  if (eval) make_parent_dirs({eval_archive, eval_labels, trials, enroll});
  std::vector<std::string> order;
  for (std::size_t i = 0; i < corpus.archive.size(); ++i) order.push_back(corpus.archive.id(i));
  write_archive(corpus.archive, train_archive);
  write_labels(corpus.labels, order, train_labels);
  out << "synth: " << corpus.archive.size() << " training utterances -> "
      << train_archive.string() << "\n";
  if (eval) {
    const SynthCorpus ec = synth_generate(*eval);
    const TrialSet set = make_trials(ec.archive, ec.labels, enroll_per_speaker);
    std::vector<std::string> eorder;
    for (std::size_t i = 0; i < ec.archive.size(); ++i) eorder.push_back(ec.archive.id(i));
    write_archive(ec.archive, eval_archive);
    write_labels(ec.labels, eorder, eval_labels);
    write_trials(set.trials, trials);
    write_enrollments(set.enrollments, enroll);
    out << "synth: " << ec.archive.size() << " evaluation utterances, " << set.trials.size()
        << " trials -> " << trials.string() << "\n";
  }
}

void cmd_train(const RunConfig& cfg, std::uint64_t seed,
               const std::optional<std::string>& variant, std::ostream& out) {
  const TrainConfig tc = train_config(cfg, seed, variant);
  const fs::path model_path = cfg.get_path("paths.model");
  const fs::path log_path = cfg.get_path("paths.train_log");
  const std::optional<fs::path> ckpt_dir =
      cfg.has("paths.checkpoint_dir") ? std::optional(cfg.get_path("paths.checkpoint_dir"))
                                      : std::nullopt;
  const std::string tag = cfg.has("train.tag") ? cfg.get_string("train.tag") : variant_name(tc);
  const bool pretrain = cfg.get_bool("train.pretrain_asr");
  std::optional<fs::path> asr_path;
  if (cfg.has("paths.asr_model")) asr_path = cfg.get_path("paths.asr_model");
  if (tc.variant == Variant::kPv && !pretrain && !asr_path)
    throw ConfigError("missing required key 'paths.asr_model' (pv without train.pretrain_asr)");
  const std::size_t min_chunk = cfg.get_count("data.min_chunk");
  const std::size_t max_chunk = cfg.get_count("data.max_chunk");
  if (min_chunk == 0 || min_chunk > max_chunk)
    throw ConfigError("data.min_chunk must lie in [1, data.max_chunk]");
  const std::size_t stride = cfg.get_count("data.phonetic_stride");
  if (stride == 0) throw ConfigError("data.phonetic_stride must be >= 1");

  TrainConfig asr_tc = tc;
  asr_tc.lr = cfg.get_real("train.asr_lr");
  asr_tc.epochs = cfg.get_count("train.asr_epochs");
  asr_tc.validate();

  const LabelledArchive data =
      load_labelled(cfg.get_path("paths.train_archive"), cfg.get_path("paths.train_labels"),
                    cfg.get_bool("data.cmn"));
  if (data.archive.empty()) throw DataError("training archive is empty");
  const XVectorConfig xc =
      xvector_config(cfg, count_speakers(data.labels), data.archive.dim());

  ChunkResult chunks =
      chunk_segments(data.archive, data.labels, min_chunk, max_chunk, derive_seed(seed, "chunk"));
  if (chunks.skipped > 0)
    log::warn(std::to_string(chunks.skipped) + " utterances shorter than data.min_chunk skipped");
  const SpeakerSplit split = split_validation(std::move(chunks.examples),
                                              cfg.get_count("data.valid_segments"),
                                              derive_seed(seed, "validation"));

  std::optional<NetworkParams> pretrained;
  if (tc.variant == Variant::kPv && !pretrain) {
    require_file(*asr_path);
    pretrained = load_network(*asr_path);
  }
  std::optional<PhoneticDataset> phonetic;
  if (tc.variant == Variant::kMultiTask || (tc.variant == Variant::kPv && pretrain)) {
    phonetic = make_phonetic_dataset(data.archive, data.labels, stride);
    if (phonetic->examples.empty()) throw DataError("training labels carry no senones");
  }

  // Inputs are validated; outputs start here.
  if (ckpt_dir) fs::create_directories(*ckpt_dir);
  make_parent_dirs({log_path, model_path});
  if (asr_path && pretrain) make_parent_dirs({*asr_path});
  std::ofstream log_os(log_path, std::ios::trunc | std::ios::binary);
  if (!log_os) throw IoError("cannot open " + log_path.string() + " for writing");
  const EpochCallback on_epoch = [&](const EpochStats& s, const NetworkParams& net) {
    const std::string line = format_epoch_line(s);
    log_os << line << "\n" << std::flush;
    out << tag << "\t" << line << "\n";
    if (ckpt_dir)
      save_network(net, *ckpt_dir / (tag + ".epoch" + std::to_string(s.epoch) + ".pxnm"));
  };

  NetworkParams net;
  switch (tc.variant) {
    case Variant::kBaseline:
      net = train_xvector(xc, split.train, split.heldout, tc, on_epoch);
      break;
    case Variant::kPv: {
      const AsrConfig ac = make_asr_config(xc, pretrain ? count_senones(data.labels)
                                                        : pretrained->num_senones(),
                                           cfg.get_count("model.asr_hidden"),
                                           cfg.get_count("model.bottleneck"));
      if (pretrain) {
        const EpochCallback asr_log = [&](const EpochStats& s, const NetworkParams&) {
          out << "asr\t" << format_epoch_line(s) << "\n";
        };
        pretrained = pretrain_asr(*phonetic, ac, asr_tc, asr_log);
        if (asr_path) save_network(*pretrained, *asr_path);
      }
      NetworkParams pv = build_pv_network(xc, ac, *pretrained, derive_seed(seed, "pv-init"));
      out << "theta_a checksum before " << hex(checksum(pv, {Partition::kAsr})) << "\n";
      net = joint_train_pv(std::move(pv), split.train, split.heldout, tc, on_epoch);
      out << "theta_a checksum after " << hex(checksum(net, {Partition::kAsr})) << "\n";
      break;
    }
    case Variant::kMultiTask: {
      MtConfig mc{tc.shared_layers, xc, count_senones(data.labels)};
      NetworkParams mt = build_mt_network(mc, derive_seed(seed, "mt-init"));
      net = train_mt(std::move(mt), split.train, split.heldout, *phonetic, tc, on_epoch);
      break;
    }
  }
  log_os.close();
  if (!log_os) throw IoError("failed writing " + log_path.string());
  save_network(net, model_path);
  out << "train: " << variant_name(tc) << " model -> " << model_path.string() << "\n";
}

void cmd_extract(const RunConfig& cfg, std::ostream& out) {
  const fs::path model_path = cfg.get_path("paths.model");
  struct Job {
    fs::path archive, output;
  };
  std::vector<Job> jobs;
  if (cfg.has("paths.train_embeddings"))
    jobs.push_back({cfg.get_path("paths.train_archive"), cfg.get_path("paths.train_embeddings")});
  if (cfg.has("paths.eval_embeddings"))
    jobs.push_back({cfg.get_path("paths.eval_archive"), cfg.get_path("paths.eval_embeddings")});
  if (jobs.empty())
    throw ConfigError("missing required key 'paths.train_embeddings' or 'paths.eval_embeddings'");
  require_file(model_path);
  for (const auto& j : jobs) require_file(j.archive);
  const NetworkParams net = load_network(model_path);
  if (!net.has_speaker_head()) throw DataError(model_path.string() + " has no speaker head");
  const bool cmn = cfg.get_bool("data.cmn");

  std::vector<EmbeddingTable> tables;
  for (const auto& j : jobs) {
    const FeatureArchive archive = read_archive(j.archive);
    if (!archive.empty() && archive.dim() != net.input_dim())
      throw ShapeError(j.archive.string() + " has " + std::to_string(archive.dim()) +
                       "-dim features, model expects " + std::to_string(net.input_dim()));
    EmbeddingTable table;
    for (std::size_t i = 0; i < archive.size(); ++i)
      table.add(archive.id(i), extract_embedding(net, cmn ? apply_cmn(archive.features(i))
                                                          : archive.features(i)));
    tables.push_back(std::move(table));
  }
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    make_parent_dirs({jobs[k].output});
    write_embeddings(tables[k], jobs[k].output);
    out << "extract: " << tables[k].size() << " embeddings -> " << jobs[k].output.string()
        << "\n";
  }
}

void cmd_backend(const RunConfig& cfg, std::ostream& out) {
  const fs::path emb_path = cfg.get_path("paths.train_embeddings");
  const fs::path labels_path = cfg.get_path("paths.train_labels");
  const fs::path backend_path = cfg.get_path("paths.backend");
  const std::size_t lda_dim = cfg.get_count("backend.lda_dim");
  const std::size_t iters = cfg.get_count("backend.plda_iters");
  if (lda_dim == 0) throw ConfigError("backend.lda_dim must be >= 1");
  const EmbeddingTable emb = load_embeddings(emb_path);
  require_file(labels_path);
  const LabelTable labels = read_labels(labels_path);
  std::vector<std::size_t> speakers;
  for (std::size_t i = 0; i < emb.size(); ++i) {
    auto it = labels.speaker_of.find(emb.id(i));
    if (it == labels.speaker_of.end()) throw DataError("no speaker label for " + emb.id(i));
    speakers.push_back(it->second);
  }
  BackendModel model;
  model.lda = lda_train(emb.vectors(), speakers, lda_dim);
  const auto processed = preprocess(model.lda, emb.vectors());
  model.plda = plda_train(processed, speakers, iters);
  make_parent_dirs({backend_path});
  save_backend(model, backend_path);
  out << "backend: LDA " << model.lda.input_dim() << " -> " << model.lda.output_dim()
      << ", PLDA trained on " << emb.size() << " embeddings -> " << backend_path.string()
      << "\n";
}

void cmd_score(const RunConfig& cfg, std::ostream& out) {
  const fs::path backend_path = cfg.get_path("paths.backend");
  const fs::path emb_path = cfg.get_path("paths.eval_embeddings");
  const fs::path enroll_path = cfg.get_path("paths.enroll");
  const fs::path trials_path = cfg.get_path("paths.trials");
  const fs::path scores_path = cfg.get_path("paths.scores");
  require_file(backend_path);
  require_file(enroll_path);
  require_file(trials_path);
  const BackendModel model = load_backend(backend_path);
  const EmbeddingTable emb = load_embeddings(emb_path);
  const auto enrollments = read_enrollments(enroll_path);
  const auto trials = read_trials(trials_path);
  if (emb.size() > 0 && emb.dim() != model.lda.input_dim())
    throw ShapeError("embeddings have dimension " + std::to_string(emb.dim()) +
                     ", backend expects " + std::to_string(model.lda.input_dim()));

  EmbeddingTable tests;
  for (std::size_t i = 0; i < emb.size(); ++i)
    tests.add(emb.id(i), preprocess(model.lda, emb.vector(i)));
  EmbeddingTable enrolled;
  for (const auto& e : enrollments) {
    std::vector<Vector> members;
    for (const auto& u : e.utterances) {
      const Vector* v = tests.find(u);
      if (!v) throw DataError("enrollment " + e.id + " refers to unknown utterance " + u);
      members.push_back(*v);
    }
    enrolled.add(e.id, enroll_speaker(members));
  }
  const PldaScorer scorer(model.plda);
  const ScoreSet set = score_all_trials(scorer, enrolled, tests, trials);
  std::vector<Score> scores;
  scores.reserve(set.records.size());
  for (const auto& r : set.records) scores.push_back({r.enroll, r.test, r.score});
  make_parent_dirs({scores_path});
  write_scores(scores, scores_path);
  out << "score: " << scores.size() << " trials -> " << scores_path.string() << "\n";
}

void cmd_eval(const RunConfig& cfg, std::ostream& out) {
  const fs::path trials_path = cfg.get_path("paths.trials");
  const fs::path scores_path = cfg.get_path("paths.scores");
  const fs::path report_path = cfg.get_path("paths.report");
  const std::optional<fs::path> det_path =
      cfg.has("paths.det") ? std::optional(cfg.get_path("paths.det")) : std::nullopt;
  const DcfParams d08 = dcf(cfg, "dcf08"), d10 = dcf(cfg, "dcf10");
  require_file(trials_path);
  require_file(scores_path);
  const ScoreSet set = join_scores(read_trials(trials_path), read_scores(scores_path));
  const MetricsReport report = evaluate(set, d08, d10);
  const auto points = det_points(set);
  const std::string text = format_report(report);
  make_parent_dirs({report_path});
  if (det_path) make_parent_dirs({*det_path});
  write_text(report_path, text);
  if (det_path) write_det_csv(points, *det_path);
  out << text;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"pxv: x-vector, phonetic-vector and multi-task speaker verification"};
  app.name("pxv");
  std::string config_path;
  std::optional<std::uint64_t> seed;
  bool verbose = false;
  app.add_option("--config", config_path, "run configuration file")->required();
  app.add_option("--seed", seed, "master seed (overrides the config)");
  app.add_flag("--verbose", verbose, "log progress to stderr");
  app.require_subcommand(1);
  auto* synth = app.add_subcommand("synth", "generate the synthetic corpus");
  auto* train = app.add_subcommand("train", "train a speaker network");
  std::optional<std::string> variant;
  train->add_option("--variant", variant, "baseline, pv or mt-1 ... mt-5 (overrides config)");
  auto* extract = app.add_subcommand("extract", "extract embeddings");
  auto* backend = app.add_subcommand("backend", "train LDA and PLDA");
  auto* score = app.add_subcommand("score", "score trials");
  auto* eval = app.add_subcommand("eval", "compute detection metrics");

  std::vector<std::string> argv_store;
  argv_store.push_back("pxv");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  log::set_verbose(verbose);
  try {
    RunConfig cfg = RunConfig::load(config_path);
    const std::uint64_t s = seed ? *seed : cfg.get_u64("seed");
    if (synth->parsed()) cmd_synth(cfg, s, out);
    else if (train->parsed()) cmd_train(cfg, s, variant, out);
    else if (extract->parsed()) cmd_extract(cfg, out);
    else if (backend->parsed()) cmd_backend(cfg, out);
    else if (score->parsed()) cmd_score(cfg, out);
    else if (eval->parsed()) cmd_eval(cfg, out);
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "pxv: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const MetricError& e) {
    err << "pxv: metric error: " << e.what() << "\n";
    return kExitMetric;
  } catch (const Error& e) {
    err << "pxv: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "pxv: " << e.what() << "\n";
    return kExitIo;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace pxv
