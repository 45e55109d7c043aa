// Copyright 2026  The trivox authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>

#include "core/binio.h"
#include "pipeline/config.h"
#include "pipeline/manifest.h"
#include "pipeline/report.h"
#include "pipeline/stages.h"
#include "pipeline/toy_corpus.h"
#include "units/kmeans.h"

using namespace trivox;
namespace fs = std::filesystem;

namespace {
std::string temp_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  os << text;
}
}  // namespace

TEST_CASE("manifest: duplicates cited with both line numbers, aggregated") {
  const auto dir = temp_dir("trivox_pipe_manifest");
  const std::string path = dir + "/m.txt";
  write_file(path,
             "u1|a.wav|spk1|S1|angry\n"
             "u2|b.wav|spk1|S1|sad\n"
             "u1|c.wav|spk2|S1|happy\n"
             "|d.wav|spk2\n");
  const auto errors = pipeline::validate_manifest(path, /*check_paths=*/false);
  REQUIRE(errors.size() == 2);
  CHECK(errors[0].find("lines 1 and 3") != std::string::npos);
  CHECK(errors[1].find("empty utt_id") != std::string::npos);

  write_file(dir + "/empty.txt", "");
  const auto empty_errors = pipeline::validate_manifest(dir + "/empty.txt", false);
  REQUIRE(empty_errors.size() == 1);
  CHECK(empty_errors[0].find("empty manifest") != std::string::npos);

  std::string ok_text;
  for (int i = 0; i < 10; ++i)
    ok_text += "u" + std::to_string(i) + "|w.wav|spk|S1|neutral\n";
  write_file(dir + "/ok.txt", ok_text);
  CHECK(pipeline::validate_manifest(dir + "/ok.txt", false).empty());
  const auto m = pipeline::load_manifest(dir + "/ok.txt", false);
  CHECK(m.rows.size() == 10);
  CHECK(m.find("u3") != nullptr);
  CHECK(m.find("nope") == nullptr);
  // Missing wav paths are reported when path checking is on.
  const auto path_errors = pipeline::validate_manifest(dir + "/ok.txt", true);
  CHECK(path_errors.size() == 10);
}

TEST_CASE("key-value config: precedence, typos, serialization") {
  const auto dir = temp_dir("trivox_pipe_config");
  write_file(dir + "/c.txt",
             "train.batch_size 2\n"
             "# comment line\n"
             "units.vocab_size 24\n"
             "run.dir " + dir + "/run\n");
  auto kv = pipeline::KeyValues::from_file(dir + "/c.txt");
  kv.set("train.batch_size", "3");  // flag overrides file
  const auto cfg = pipeline::PipelineConfig::resolve(kv);
  CHECK(cfg.train.batch_size == 3);
  CHECK(cfg.unit_vocab_size == 24);
  CHECK(cfg.run_dir == dir + "/run");
  CHECK(cfg.model.vocab_size == 24);  // follows units unless set

  pipeline::KeyValues bad;
  bad.set("train.batchsize", "2");
  CHECK_THROWS_AS(pipeline::PipelineConfig::resolve(bad), Error);
  pipeline::KeyValues nonnum;
  nonnum.set("train.batch_size", "two");
  CHECK_THROWS_AS(pipeline::PipelineConfig::resolve(nonnum), Error);

  // Serialized resolved config is stable and sorted.
  CHECK(kv.serialize() == kv.serialize());
}

TEST_CASE("stage DAG is acyclic and dependencies are complete") {
  pipeline::check_stage_dag();
  CHECK(pipeline::kStages.size() == 10);
  for (const auto& s : pipeline::kStages)
    for (const auto& d : pipeline::stage_deps(s))
      CHECK(std::find(pipeline::kStages.begin(), pipeline::kStages.end(), d) !=
            pipeline::kStages.end());
  CHECK_THROWS_AS(pipeline::stage_deps("nonsense"), Error);
}

TEST_CASE("missing upstream artifacts name the producing stage") {
  const auto dir = temp_dir("trivox_pipe_deps");
  pipeline::ToyCorpusSpec spec;
  spec.utts_per_speaker = 2;
  const auto manifest = pipeline::generate_toy_corpus(spec, dir + "/corpus");

  pipeline::KeyValues kv;
  kv.set("run.dir", dir + "/run");
  const auto cfg = pipeline::PipelineConfig::resolve(kv);
  bool threw = false;
  try {
    pipeline::run_stage("pretrain", cfg, dir + "/corpus/manifest.txt");
  } catch (const pipeline::MissingDependency& e) {
    threw = true;
    const std::string msg = e.what();
    CHECK(msg.find("run extract-features first") != std::string::npos);
  }
  CHECK(threw);
}

TEST_CASE("stages are idempotent until inputs or config change") {
  const auto dir = temp_dir("trivox_pipe_stages");
  pipeline::ToyCorpusSpec spec;
  spec.utts_per_speaker = 3;
  spec.duration_s = 0.5;
  pipeline::generate_toy_corpus(spec, dir + "/corpus");
  const std::string manifest = dir + "/corpus/manifest.txt";

  pipeline::KeyValues kv;
  kv.set("run.dir", dir + "/run");
  kv.set("units.vocab_size", "8");
  const auto cfg = pipeline::PipelineConfig::resolve(kv);

  CHECK_FALSE(pipeline::run_stage("extract-features", cfg, manifest).skipped);
  CHECK(pipeline::run_stage("extract-features", cfg, manifest).skipped);
  CHECK_FALSE(pipeline::run_stage("train-kmeans", cfg, manifest).skipped);
  CHECK(pipeline::run_stage("train-kmeans", cfg, manifest).skipped);
  CHECK_FALSE(pipeline::run_stage("quantize", cfg, manifest).skipped);
  const auto units_hash = binio::hash_file(dir + "/run/quantize/units.txt");
  CHECK(pipeline::run_stage("quantize", cfg, manifest).skipped);
  CHECK(binio::hash_file(dir + "/run/quantize/units.txt") == units_hash);

  // A config change invalidates the provenance match.
  pipeline::KeyValues kv2 = kv;
  kv2.set("units.vocab_size", "12");
  const auto cfg2 = pipeline::PipelineConfig::resolve(kv2);
  CHECK_FALSE(pipeline::run_stage("train-kmeans", cfg2, manifest).skipped);

  // Unit files carry one line per utterance and speed variant.
  const auto unit_rows = trivox::units::load_units(dir + "/run/quantize/units.txt");
  CHECK(unit_rows.size() == 6 * 3);  // 6 utts x factors {0.9, 1.0, 1.1}
  for (const auto& [utt, ids] : unit_rows) {
    CHECK(!ids.empty());
    for (size_t i = 1; i < ids.size(); ++i) CHECK(ids[i] != ids[i - 1]);
  }

  // The training view joins mels and units per variant.
  const auto m = pipeline::load_manifest(manifest);
  const auto set = pipeline::load_training_set(cfg, m);
  CHECK(set.size() == 6);
  for (const auto& u : set) {
    CHECK(u.factors.size() == 3);
    CHECK(u.mels.size() == 3);
    CHECK(u.units.size() == 3);
  }
}

TEST_CASE("variant ids follow the sp-prefix convention") {
  CHECK(pipeline::variant_id("u1", 1.0) == "u1");
  CHECK(pipeline::variant_id("u1", 0.9) == "sp0.90-u1");
  CHECK(pipeline::variant_id("u1", 1.1) == "sp1.10-u1");
}

TEST_CASE("toy corpus: determinism and controllable structure") {
  pipeline::ToyCorpusSpec spec;
  spec.duration_s = 0.5;
  const auto a = pipeline::toy_utterance(spec, 0, 0, 0, "angry");
  const auto b = pipeline::toy_utterance(spec, 0, 0, 0, "angry");
  CHECK(a.samples == b.samples);
  const auto c = pipeline::toy_utterance(spec, 0, 0, 1, "angry");
  CHECK(a.samples != c.samples);

  // Emotion moves the pitch in the expected direction.
  dsp::DspConfig dcfg;
  auto median_f0 = [&](const std::string& emo) {
    pipeline::ToyCorpusSpec s2;
    s2.duration_s = 0.8;
    const auto w = pipeline::toy_utterance(s2, 0, 0, 0, emo);
    const auto p = dsp::extract_f0(w, dcfg);
    std::vector<double> voiced;
    for (double v : p.f0_hz)
      if (v > 0) voiced.push_back(v);
    REQUIRE(!voiced.empty());
    std::sort(voiced.begin(), voiced.end());
    return voiced[voiced.size() / 2];
  };
  CHECK(median_f0("angry") > median_f0("neutral"));
  CHECK(median_f0("sad") < median_f0("neutral"));
}

TEST_CASE("report emission is read-only over run artifacts") {
  const auto dir = temp_dir("trivox_pipe_report");
  fs::create_directories(dir + "/run/pretrain");
  write_file(dir + "/run/pretrain/curve.csv",
             "step,train_mse,val_mse,lr,grad_norm\n0,1.0,,0.001,0.5\n");
  const auto before = binio::hash_file(dir + "/run/pretrain/curve.csv");
  const auto res = pipeline::emit_report(dir + "/run");
  CHECK(fs::exists(res.summary_path));
  CHECK(fs::exists(dir + "/run/report/train_curve.csv"));
  CHECK(binio::hash_file(dir + "/run/pretrain/curve.csv") == before);
  CHECK(!res.missing.empty());  // evc artifacts absent and listed
}
