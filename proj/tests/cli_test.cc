// tests/cli_test.cc

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

#include <gtest/gtest.h>

#include <fstream>
#include <regex>
#include <sstream>

#include "pxv/cli.h"
#include "pxv/config.h"
#include "pxv/error.h"
#include "test_util.h"

namespace pxv {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

// --- configuration file ----------------------------------------------------

TEST(Config, ParsesKeysCommentsAndLists) {
  const RunConfig c = RunConfig::parse(
      "# comment\n"
      "seed = 42\n"
      "  train.lr=0.5   # trailing comment\n"
      "\n"
      "model.frame_dims = 1, 2,3,4 ,5\n"
      "data.cmn = true\n");
  EXPECT_EQ(c.get_u64("seed"), 42u);
  EXPECT_EQ(c.get_real("train.lr"), 0.5);
  EXPECT_EQ(c.get_count_list("model.frame_dims"), (std::vector<std::size_t>{1, 2, 3, 4, 5}));
  EXPECT_TRUE(c.get_bool("data.cmn"));
  EXPECT_EQ(c.get_real("train.asr_lr_scale"), 0.2);  // schema default
  EXPECT_FALSE(c.has("train.asr_lr_scale"));
}

std::string config_error(std::string_view text) {
  try {
    RunConfig::parse(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(Config, ErrorsNameTheLine) {
  EXPECT_NE(config_error("seed = 1\nnot.a.key = 3\n").find("line 2"), std::string::npos);
  EXPECT_NE(config_error("seed = 1\nseed = 2\n").find("line 2"), std::string::npos);
  EXPECT_NE(config_error("train.lr = fast\n").find("line 1"), std::string::npos);
  EXPECT_NE(config_error("synth.num_speakers = -3\n").find("line 1"), std::string::npos);
  EXPECT_NE(config_error("seed\n").find("line 1"), std::string::npos);
}

TEST(Config, MissingRequiredKey) {
  const RunConfig c = RunConfig::parse("seed = 1\n");
  try {
    c.get_count("synth.feat_dim");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("missing required key 'synth.feat_dim'"),
              std::string::npos);
  }
}

TEST(Config, RelativePathsResolveAgainstConfigDirectory) {
  TempDir dir("config-paths");
  std::ofstream(dir / "run.conf") << "paths.model = out/m.pxnm\npaths.scores = /abs/s.txt\n";
  const RunConfig c = RunConfig::load(dir / "run.conf");
  EXPECT_EQ(c.get_path("paths.model"), dir.path() / "out/m.pxnm");
  EXPECT_EQ(c.get_path("paths.scores"), fs::path("/abs/s.txt"));
}

TEST(Config, EverySchemaKeyHasHelp) {
  for (const auto& k : config_schema()) EXPECT_FALSE(k.help.empty()) << k.name;
}

// --- command line ----------------------------------------------------------

struct RunResult {
  int code = -1;
  std::string out, err;
};

RunResult run(std::vector<std::string> args) {
  std::ostringstream out, err;
  RunResult r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// A pipeline small enough to run in a couple of seconds.
const char* kTinyConfig = R"(seed = 5
synth.num_speakers = 6
synth.num_senones = 5
synth.feat_dim = 4
synth.utts_per_speaker = 6
synth.min_frames = 40
synth.max_frames = 60
synth.eval_speakers = 3
synth.eval_utts_per_speaker = 5
synth.enroll_per_speaker = 2
data.min_chunk = 20
data.max_chunk = 40
data.valid_segments = 4
data.phonetic_stride = 4
model.frame_dims = 8,8,8,8,12
model.segment_dims = 8,8
model.asr_hidden = 8
model.bottleneck = 4
train.variant = baseline
train.lr = 0.05
train.speaker_batch = 8
train.phonetic_batch = 16
train.epochs = 2
train.asr_epochs = 1
train.asr_lr = 0.05
train.pretrain_asr = true
backend.lda_dim = 4
backend.plda_iters = 3
paths.train_archive = work/train.pxfa
paths.train_labels = work/train.labels
paths.eval_archive = work/eval.pxfa
paths.eval_labels = work/eval.labels
paths.trials = work/trials.txt
paths.enroll = work/enroll.txt
paths.asr_model = work/asr.pxnm
paths.model = work/model.pxnm
paths.train_log = work/train.log
paths.checkpoint_dir = work/ckpt
paths.train_embeddings = work/train.emb
paths.eval_embeddings = work/eval.emb
paths.backend = work/backend.pxnm
paths.scores = work/scores.txt
paths.report = work/report.txt
paths.det = work/det.csv
)";

fs::path write_config(const TempDir& dir, const std::string& extra = "",
                      const std::string& name = "run.conf") {
  const fs::path p = dir / name;
  std::ofstream(p) << kTinyConfig << extra;
  return p;
}

RunResult pipeline(const fs::path& conf, const std::string& variant = "baseline") {
  const std::string c = conf.string();
  for (const char* cmd : {"synth", "train", "extract", "backend", "score", "eval"}) {
    std::vector<std::string> args = {"--config", c, cmd};
    if (std::string(cmd) == "train") args.insert(args.end(), {"--variant", variant});
    RunResult r = run(args);
    if (r.code != kExitOk) return r;
    if (std::string(cmd) == "eval") return r;
  }
  return {};
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({"synth"}).code, kExitConfig);            // --config missing
  EXPECT_EQ(run({"--config", "x.conf"}).code, kExitConfig);  // no subcommand
  EXPECT_EQ(run({"--config", "x.conf", "frobnicate"}).code, kExitConfig);
  EXPECT_EQ(run({"--help"}).code, kExitOk);
}

TEST(Cli, ConfigErrorsExitTwo) {
  TempDir dir("cli-config");
  std::ofstream(dir / "bad.conf") << "seed = 1\nbogus.key = 2\n";
  RunResult r = run({"--config", (dir / "bad.conf").string(), "synth"});
  EXPECT_EQ(r.code, kExitConfig);
  EXPECT_NE(r.err.find("line 2"), std::string::npos);
  std::ofstream(dir / "nofeat.conf") << "seed = 1\n";
  r = run({"--config", (dir / "nofeat.conf").string(), "synth"});
  EXPECT_EQ(r.code, kExitConfig);
  EXPECT_NE(r.err.find("missing required key 'synth.num_speakers'"), std::string::npos);
  EXPECT_EQ(run({"--config", write_config(dir).string(), "train", "--variant", "mt-9"}).code,
            kExitConfig);
}

TEST(Cli, MissingConfigFileExitsThree) {
  const RunResult r = run({"--config", "/nonexistent/pxv.conf", "synth"});
  EXPECT_EQ(r.code, kExitIo);
  EXPECT_NE(r.err.find("/nonexistent/pxv.conf"), std::string::npos);
}

TEST(Cli, MissingInputExitsThreeWithPath) {
  TempDir dir("cli-missing");
  const fs::path conf = write_config(dir);
  const RunResult r = run({"--config", conf.string(), "train"});
  EXPECT_EQ(r.code, kExitIo);
  EXPECT_NE(r.err.find("train.pxfa"), std::string::npos);
  for (const char* cmd : {"extract", "backend", "score", "eval"})
    EXPECT_EQ(run({"--config", conf.string(), cmd}).code, kExitIo) << cmd;
}

TEST(Cli, ConfigErrorWritesNothing) {
  TempDir dir("cli-partial");
  const fs::path conf = write_config(dir);
  ASSERT_EQ(run({"--config", conf.string(), "synth"}).code, kExitOk);
  const fs::path bad = write_config(dir, "train.asr_lr_scale = -1\n", "bad.conf");
  EXPECT_EQ(run({"--config", bad.string(), "train"}).code, kExitConfig);
  EXPECT_FALSE(fs::exists(dir / "work/model.pxnm"));
  EXPECT_FALSE(fs::exists(dir / "work/train.log"));
  EXPECT_FALSE(fs::exists(dir / "work/ckpt"));
}

TEST(Cli, CorruptArchiveExitsThree) {
  TempDir dir("cli-corrupt");
  const fs::path conf = write_config(dir);
  ASSERT_EQ(run({"--config", conf.string(), "synth"}).code, kExitOk);
  {
    std::fstream f(dir / "work/train.pxfa", std::ios::in | std::ios::out | std::ios::binary);
    f.write("JUNK", 4);
  }
  const RunResult r = run({"--config", conf.string(), "train"});
  EXPECT_EQ(r.code, kExitIo);
  EXPECT_NE(r.err.find("offset 0"), std::string::npos);
}

TEST(Cli, FullPipelineReportsAllMetrics) {
  TempDir dir("cli-full");
  const fs::path conf = write_config(dir);
  const RunResult r = pipeline(conf);
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const std::string report = read_file(dir / "work/report.txt");
  EXPECT_EQ(r.out, report);
  const std::regex want(
      "EER [0-9]+\\.[0-9]{6}\nEER_percent [0-9]+\\.[0-9]{6}\nminDCF08 [0-9]+\\.[0-9]{6}\n"
      "minDCF10 [0-9]+\\.[0-9]{6}\n");
  EXPECT_TRUE(std::regex_match(report, want)) << report;
  EXPECT_EQ(read_file(dir / "work/det.csv").rfind("p_miss,p_fa\n", 0), 0u);
  EXPECT_TRUE(fs::exists(dir / "work/ckpt/baseline.epoch1.pxnm"));
  EXPECT_TRUE(fs::exists(dir / "work/ckpt/baseline.epoch2.pxnm"));

  const std::string log = read_file(dir / "work/train.log");
  EXPECT_TRUE(std::regex_match(log, std::regex("(\\d+\t\\d+\\.\\d{6}\t\\d+\\.\\d{6}\n){2}"))) << log;

  // Re-running eval on the same scores gives identical bytes.
  ASSERT_EQ(run({"--config", conf.string(), "eval"}).code, kExitOk);
  EXPECT_EQ(read_file(dir / "work/report.txt"), report);
}

TEST(Cli, PipelineIsByteReproducible) {
  TempDir a("cli-det-a"), b("cli-det-b");
  for (const std::string& variant : {"baseline", "mt-3"}) {
    ASSERT_EQ(pipeline(write_config(a), variant).code, kExitOk);
    ASSERT_EQ(pipeline(write_config(b), variant).code, kExitOk);
    for (const char* f : {"work/train.pxfa", "work/model.pxnm", "work/train.log", "work/eval.emb",
                          "work/backend.pxnm", "work/scores.txt", "work/report.txt"})
      EXPECT_EQ(read_file(a / f), read_file(b / f)) << variant << " " << f;
  }
}

TEST(Cli, SeedFlagOverridesConfig) {
  TempDir dir("cli-seed");
  const fs::path conf = write_config(dir);
  ASSERT_EQ(run({"--config", conf.string(), "synth"}).code, kExitOk);
  const std::string first = read_file(dir / "work/train.pxfa");
  ASSERT_EQ(run({"--config", conf.string(), "--seed", "6", "synth"}).code, kExitOk);
  EXPECT_NE(read_file(dir / "work/train.pxfa"), first);
}

std::pair<std::string, std::string> checksum_lines(const std::string& out) {
  std::smatch m1, m2;
  std::regex_search(out, m1, std::regex("theta_a checksum before ([0-9a-f]+)"));
  std::regex_search(out, m2, std::regex("theta_a checksum after ([0-9a-f]+)"));
  return {m1.size() > 1 ? m1[1].str() : "", m2.size() > 1 ? m2[1].str() : ""};
}

TEST(Cli, PvFreezeAndFineTuneChecksums) {
  TempDir dir("cli-pv");
  const fs::path frozen = write_config(dir, "train.asr_lr_scale = 0\n", "frozen.conf");
  ASSERT_EQ(run({"--config", frozen.string(), "synth"}).code, kExitOk);
  RunResult r = run({"--config", frozen.string(), "train", "--variant", "pv"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto [before, after] = checksum_lines(r.out);
  EXPECT_FALSE(before.empty());
  EXPECT_EQ(before, after);
  EXPECT_TRUE(fs::exists(dir / "work/asr.pxnm"));

  const fs::path tuned = write_config(dir, "", "tuned.conf");
  r = run({"--config", tuned.string(), "train", "--variant", "pv"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto [b2, a2] = checksum_lines(r.out);
  EXPECT_EQ(b2, before);  // same pretrained ASR network
  EXPECT_NE(a2, b2);
}

TEST(Cli, EvalWithoutTargetsExitsFour) {
  TempDir dir("cli-metric");
  const fs::path conf = write_config(dir);
  fs::create_directories(dir / "work");
  std::ofstream(dir / "work/trials.txt") << "a x nontarget\nb x nontarget\n";
  std::ofstream(dir / "work/scores.txt") << "a x 1.0\nb x 0.5\n";
  const RunResult r = run({"--config", conf.string(), "eval"});
  EXPECT_EQ(r.code, kExitMetric);
  EXPECT_NE(r.err.find("no target trials"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "work/report.txt"));
}

TEST(Cli, ScoresMissingForATrialExitsThree) {
  TempDir dir("cli-join");
  const fs::path conf = write_config(dir);
  fs::create_directories(dir / "work");
  std::ofstream(dir / "work/trials.txt") << "a x target\nb x nontarget\n";
  std::ofstream(dir / "work/scores.txt") << "a x 1.0\n";
  EXPECT_EQ(run({"--config", conf.string(), "eval"}).code, kExitIo);
}

}  // namespace
}  // namespace pxv
