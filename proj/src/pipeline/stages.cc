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

#include "pipeline/stages.h"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

#include "core/binio.h"
#include "core/check.h"
#include "dsp/griffin_lim.h"
#include "eval/evc.h"
#include "eval/metrics.h"
#include "eval/ser.h"
#include "model/checkpoint.h"
#include "train/trainer.h"
#include "units/features.h"
#include "units/kmeans.h"

namespace trivox::pipeline {

namespace fs = std::filesystem;
using json = nlohmann::json;

const std::vector<std::string> kStages = {
    "extract-features", "train-kmeans", "quantize",           "pretrain",
    "finetune-ser",     "finetune-evc", "convert",            "evaluate",
    "export-embeddings", "probe"};

std::vector<std::string> stage_deps(const std::string& stage) {
  if (stage == "extract-features") return {};
  if (stage == "train-kmeans") return {"extract-features"};
  if (stage == "quantize") return {"extract-features", "train-kmeans"};
  if (stage == "pretrain") return {"extract-features", "quantize"};
  if (stage == "finetune-ser") return {"pretrain"};
  if (stage == "finetune-evc") return {"pretrain"};
  if (stage == "convert") return {"pretrain", "quantize", "extract-features"};
  if (stage == "evaluate") return {"convert"};
  if (stage == "export-embeddings") return {"pretrain", "quantize"};
  if (stage == "probe") return {"pretrain"};
  TVX_FAIL() << "unknown stage: " << stage;
}

void check_stage_dag() {
  // Kahn topological sort over the static graph.
  std::map<std::string, int> indegree;
  for (const auto& s : kStages) indegree[s] = 0;
  for (const auto& s : kStages)
    for (const auto& d : stage_deps(s)) {
      TVX_CHECK(indegree.count(d) == 1) << "stage " << s << " depends on unknown stage " << d;
      ++indegree[s];
    }
  std::vector<std::string> ready;
  for (const auto& [s, deg] : indegree)
    if (deg == 0) ready.push_back(s);
  size_t done = 0;
  while (!ready.empty()) {
    const std::string cur = ready.back();
    ready.pop_back();
    ++done;
    for (const auto& s : kStages)
      for (const auto& d : stage_deps(s))
        if (d == cur && --indegree[s] == 0) ready.push_back(s);
  }
  TVX_CHECK(done == kStages.size()) << "stage dependency graph has a cycle";
}

std::string variant_id(const std::string& utt_id, double factor) {
  if (factor == 1.0) return utt_id;
  char buf[32];
  std::snprintf(buf, sizeof buf, "sp%.2f-", factor);
  return std::string(buf) + utt_id;
}

namespace {

std::string stage_dir(const PipelineConfig& cfg, const std::string& stage) {
  return cfg.run_dir + "/" + stage;
}

uint64_t dir_hash(const std::string& dir) {
  if (!fs::exists(dir)) return 0;
  std::vector<std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) files.push_back(e.path().string());
  std::sort(files.begin(), files.end());
  uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& f : files) {
    h = binio::fnv1a_str(f, h);
    const uint64_t fh = binio::hash_file(f);
    h = binio::fnv1a(&fh, sizeof fh, h);
  }
  return h;
}

std::string now_iso8601() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

json expected_provenance(const PipelineConfig& cfg, const std::string& stage,
                         const std::map<std::string, uint64_t>& inputs) {
  json j;
  j["stage"] = stage;
  j["config_hash"] = binio::fnv1a_str(cfg.resolved.serialize());
  j["seed"] = cfg.global_seed;
  json in;
  for (const auto& [k, v] : inputs) in[k] = v;
  j["input_hashes"] = in;
  return j;
}

bool provenance_matches(const std::string& dir, const json& expected) {
  const std::string path = dir + "/provenance.json";
  if (!fs::exists(path)) return false;
  std::ifstream is(path);
  json found;
  try {
    is >> found;
  } catch (const std::exception&) {
    return false;
  }
  for (const auto& key : {"stage", "config_hash", "seed", "input_hashes"})
    if (!found.contains(key) || found[key] != expected[key]) return false;
  return true;
}

void write_provenance(const std::string& dir, json j) {
  j["timestamp"] = now_iso8601();
  std::ofstream os(dir + "/provenance.json");
  TVX_CHECK(os.good()) << "cannot write provenance in " << dir;
  os << j.dump(2) << "\n";
}

void require_deps(const PipelineConfig& cfg, const std::string& stage) {
  for (const auto& d : stage_deps(stage))
    if (!fs::exists(stage_dir(cfg, d) + "/provenance.json"))
      throw MissingDependency("stage '" + stage + "' needs artifacts from '" +
                              d + "': run " + d + " first");
}

std::vector<double> speed_factors(const PipelineConfig& cfg) {
  if (cfg.feature_source == "external") return {1.0};
  return cfg.augment.speed_factors;
}

// ---- individual stages ---------------------------------------------------

void stage_extract_features(const PipelineConfig& cfg, const Manifest& manifest,
                            const std::string& dir) {
  fs::create_directories(dir + "/mels");
  fs::create_directories(dir + "/features");
  fs::create_directories(dir + "/pitch");
  for (const auto& row : manifest.rows) {
    const auto wav = dsp::read_wav(row.wav_path, row.utt_id);
    for (double factor : speed_factors(cfg)) {
      const auto w = dsp::speed_perturb(wav, factor);
      const std::string vid = variant_id(row.utt_id, factor);
      dsp::write_mel(dir + "/mels/" + vid + ".pmel", dsp::compute_mel(w, cfg.dsp));
      if (cfg.feature_source == "mfcc") {
        units::save_features(dir + "/features/" + vid + ".pfea",
                             units::mfcc_fallback(w, cfg.dsp));
      } else {
        const std::string src = cfg.external_features_dir + "/" + vid + ".pfea";
        const auto f = units::load_external_features(src, vid);
        units::save_features(dir + "/features/" + vid + ".pfea", f);
      }
      if (factor == 1.0)
        dsp::write_pitch(dir + "/pitch/" + row.utt_id + ".f0",
                         dsp::extract_f0(w, cfg.dsp));
    }
  }
}

std::vector<units::FrameFeatures> load_all_features(const PipelineConfig& cfg) {
  const std::string fdir = stage_dir(cfg, "extract-features") + "/features";
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(fdir))
    if (e.path().extension() == ".pfea") files.push_back(e.path().string());
  std::sort(files.begin(), files.end());
  TVX_CHECK(!files.empty()) << "no feature files in " << fdir;
  std::vector<units::FrameFeatures> out;
  for (const auto& f : files)
    out.push_back(units::load_external_features(f, fs::path(f).stem().string()));
  return out;
}

void stage_train_kmeans(const PipelineConfig& cfg, const std::string& dir) {
  const auto features = load_all_features(cfg);
  units::KmeansOptions opts;
  opts.max_iters = cfg.kmeans_max_iters;
  opts.subsample = cfg.kmeans_subsample;
  const auto cb = units::train_codebook(features, cfg.unit_vocab_size,
                                        cfg.kmeans_seed, opts);
  units::save_codebook(dir + "/codebook.pkmc", cb);
  std::ofstream os(dir + "/inertia.txt");
  os.precision(12);
  os << cb.inertia << "\n";
}

void stage_quantize(const PipelineConfig& cfg, const std::string& dir) {
  const auto cb =
      units::load_codebook(stage_dir(cfg, "train-kmeans") + "/codebook.pkmc");
  const auto features = load_all_features(cfg);
  std::vector<std::pair<std::string, std::vector<int>>> dup, dedup;
  for (const auto& f : features) {
    const auto u = units::quantize(f, cb);
    const auto r = units::refine(u);
    dup.emplace_back(f.utt_id, u.ids);
    dedup.emplace_back(f.utt_id, r.ids);
  }
  units::save_units(dir + "/units_duplicated.txt", dup);
  units::save_units(dir + "/units.txt", dedup);
}

std::map<std::string, std::vector<int>> load_units_map(const PipelineConfig& cfg) {
  std::map<std::string, std::vector<int>> m;
  for (auto& [utt, ids] :
       units::load_units(stage_dir(cfg, "quantize") + "/units.txt"))
    m[utt] = std::move(ids);
  return m;
}

void stage_pretrain(const PipelineConfig& cfg, const Manifest& manifest,
                    const std::string& dir) {
  const auto utts = load_training_set(cfg, manifest);
  model::ModelConfig mc = cfg.model;
  mc.vocab_size = cfg.unit_vocab_size;
  model::Reconstructor<float> m(mc);
  train::Trainer trainer(m, cfg.train);
  // Resume an interrupted run only when the model config still matches.
  std::string resume;
  const std::string last = dir + "/last.ckpt";
  if (fs::exists(last) &&
      model::load_checkpoint(last)->cfg().serialize() == mc.serialize())
    resume = last;
  trainer.pretrain(utts, cfg.augment, dir, resume);
}

void stage_finetune_evc(const PipelineConfig& cfg, const Manifest& manifest,
                        const std::string& dir) {
  const auto utts = load_training_set(cfg, manifest);
  auto m = model::load_checkpoint(stage_dir(cfg, "pretrain") + "/best.ckpt");
  train::TrainConfig tc = eval::evc_finetune_config(cfg.train);
  train::Trainer trainer(*m, tc);
  trainer.pretrain(utts, cfg.augment, dir, "");
}

void stage_finetune_ser(const PipelineConfig& cfg, const Manifest& manifest,
                        const std::string& dir) {
  const auto data = eval::build_ser_dataset(manifest, cfg.dsp);
  const auto plan = eval::build_cv_plan(
      manifest,
      cfg.ser_mode == "session" ? eval::CvMode::kLeaveOneSessionOut
                                : eval::CvMode::kLeaveOneSpeakerOut,
      cfg.ser_cv_seed);
  eval::HeadConfig hc;
  hc.encoder_lr = cfg.ser_encoder_lr;
  hc.head_lr = cfg.ser_head_lr;
  hc.epochs = cfg.ser_epochs;
  hc.batch_size = cfg.ser_batch_size;
  hc.seed = cfg.global_seed;
  const auto report = eval::finetune_ser(
      stage_dir(cfg, "pretrain") + "/best.ckpt", data, plan, hc);
  std::ofstream os(dir + "/report.txt");
  os << report.to_text();
  report.write_confusion_csv(dir + "/confusion.csv");
}

eval::ConversionData load_conversion_data(const PipelineConfig& cfg,
                                          const Manifest& manifest) {
  eval::ConversionData data;
  const std::string mdir = stage_dir(cfg, "extract-features") + "/mels";
  auto units = load_units_map(cfg);
  for (const auto& row : manifest.rows) {
    data.mels[row.utt_id] = dsp::read_mel(mdir + "/" + row.utt_id + ".pmel").frames;
    auto it = units.find(row.utt_id);
    TVX_CHECK(it != units.end()) << "no units for " << row.utt_id;
    data.units[row.utt_id] = it->second;
    data.speaker_of[row.utt_id] = row.speaker_id;
  }
  return data;
}

std::string convert_checkpoint(const PipelineConfig& cfg) {
  const std::string evc = stage_dir(cfg, "finetune-evc") + "/best.ckpt";
  if (fs::exists(evc)) return evc;
  return stage_dir(cfg, "pretrain") + "/best.ckpt";
}

void stage_convert(const PipelineConfig& cfg, const Manifest& manifest,
                   const std::string& dir) {
  auto m = model::load_checkpoint(convert_checkpoint(cfg));
  const auto data = load_conversion_data(cfg, manifest);

  // Parse "src:dst,src:dst" emotion pairs.
  std::vector<std::pair<std::string, std::string>> pairs;
  std::istringstream ps(cfg.evc_pairs);
  std::string tok;
  while (std::getline(ps, tok, ',')) {
    const auto colon = tok.find(':');
    TVX_CHECK(colon != std::string::npos) << "bad evc.pairs entry: " << tok;
    pairs.emplace_back(tok.substr(0, colon), tok.substr(colon + 1));
  }

  std::ofstream list(dir + "/conversions.csv");
  list << "conversion_id,source,prosody_ref,speaker_ref,truncated\n";
  for (const auto& [src_label, ref_label] : pairs) {
    for (const auto& row : manifest.rows) {
      if (row.raw_label != src_label) continue;
      // Prosody reference with the target label; same speaker preferred.
      const ManifestRow* ref = nullptr;
      for (const auto& cand : manifest.rows)
        if (cand.raw_label == ref_label && cand.utt_id != row.utt_id &&
            (ref == nullptr || (cand.speaker_id == row.speaker_id &&
                                ref->speaker_id != row.speaker_id)))
          ref = &cand;
      if (ref == nullptr) continue;
      eval::ConversionRequest req;
      req.source_utt = row.utt_id;
      req.prosody_ref_utt = ref->utt_id;
      const auto res = eval::convert_request(*m, req, data, cfg.dsp);
      const std::string cid = row.utt_id + "__to__" + ref->utt_id;
      dsp::write_mel(dir + "/" + cid + ".pmel", res.converted_mel);
      const auto wav = dsp::invert_mel(res.converted_mel, cfg.griffin_lim_iters,
                                       cfg.dsp);
      dsp::write_wav(dir + "/" + cid + ".wav", wav);
      // Alignment matrix for report plots.
      std::ofstream al(dir + "/" + cid + ".align.csv");
      for (int r = 0; r < res.alignments.rows; ++r)
        for (int c = 0; c < res.alignments.cols; ++c)
          al << res.alignments.at(r, c)
             << (c + 1 < res.alignments.cols ? ',' : '\n');
      list << cid << "," << row.utt_id << "," << ref->utt_id << ","
           << "auto," << (res.truncated ? 1 : 0) << "\n";
    }
  }
}

void stage_evaluate(const PipelineConfig& cfg, const Manifest& manifest,
                    const std::string& dir) {
  const std::string cdir = stage_dir(cfg, "convert");
  std::ifstream list(cdir + "/conversions.csv");
  TVX_CHECK(list.good()) << "missing conversions.csv; run convert first";
  std::string line;
  std::getline(list, line);  // header
  std::ofstream scores(dir + "/evc_scores.csv");
  scores << "utt_id,mcd_db,f0_rmse_hz\n";
  scores.precision(6);
  double mcd_sum = 0.0, f0_sum = 0.0;
  int count = 0;
  while (std::getline(list, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cid, src, ref;
    std::getline(ls, cid, ',');
    std::getline(ls, src, ',');
    std::getline(ls, ref, ',');
    const auto* ref_row = manifest.find(ref);
    TVX_CHECK(ref_row != nullptr) << "unknown reference utterance " << ref;
    const auto target_wav = dsp::read_wav(ref_row->wav_path, ref);
    const auto target_cep = dsp::mel_cepstra(target_wav, cfg.dsp);
    const auto target_f0 = dsp::extract_f0(target_wav, cfg.dsp);

    const auto conv_mel = dsp::read_mel(cdir + "/" + cid + ".pmel");
    const auto conv_cep = dsp::cepstra_from_mel(conv_mel, cfg.dsp.n_cepstra);
    const auto conv_wav = dsp::read_wav(cdir + "/" + cid + ".wav", cid);
    const auto conv_f0 = dsp::extract_f0(conv_wav, cfg.dsp);

    const double mcd = eval::mcd_db(target_cep, conv_cep);
    const double f0e = eval::f0_rmse_hz(target_f0, conv_f0);
    scores << cid << "," << mcd << "," << f0e << "\n";
    mcd_sum += mcd;
    f0_sum += f0e;
    ++count;
  }
  TVX_CHECK(count > 0) << "no conversions to evaluate";
  scores << "summary_mean," << mcd_sum / count << "," << f0_sum / count << "\n";
}

void stage_export_embeddings(const PipelineConfig& cfg, const Manifest& manifest,
                             const std::string& dir) {
  auto m = model::load_checkpoint(stage_dir(cfg, "pretrain") + "/best.ckpt");
  const std::string mdir = stage_dir(cfg, "extract-features") + "/mels";
  std::map<std::string, TensorF> mels;
  for (const auto& row : manifest.rows)
    mels[row.utt_id] = dsp::read_mel(mdir + "/" + row.utt_id + ".pmel").frames;
  eval::export_embeddings(*m, mels, load_units_map(cfg), dir);
}

void stage_probe(const PipelineConfig& cfg, const Manifest& manifest,
                 const std::string& dir) {
  const std::string mdir = stage_dir(cfg, "extract-features") + "/mels";
  std::map<std::string, dsp::MelSpectrogram> mels;
  std::map<std::string, std::string> speaker_of;
  for (const auto& row : manifest.rows) {
    mels[row.utt_id] = dsp::read_mel(mdir + "/" + row.utt_id + ".pmel");
    speaker_of[row.utt_id] = row.speaker_id;
  }
  eval::HeadConfig hc;
  hc.encoder_lr = 0.0;
  hc.head_lr = cfg.ser_head_lr;
  hc.epochs = cfg.ser_epochs;
  hc.batch_size = cfg.ser_batch_size;
  hc.seed = cfg.global_seed;
  const double acc = eval::probe_speaker(
      stage_dir(cfg, "pretrain") + "/best.ckpt", mels, speaker_of, hc);
  std::set<std::string> spk;
  for (const auto& [_, s] : speaker_of) spk.insert(s);
  std::ofstream os(dir + "/speaker_probe.txt");
  os.precision(6);
  os << "speaker_probe_accuracy " << acc << "\n";
  os << "n_speakers " << spk.size() << "\n";
  os << "chance " << 1.0 / double(spk.size()) << "\n";
}

}  // namespace

std::vector<train::TrainUtt> load_training_set(const PipelineConfig& cfg,
                                               const Manifest& manifest) {
  const std::string mdir = stage_dir(cfg, "extract-features") + "/mels";
  auto units = load_units_map(cfg);
  std::vector<train::TrainUtt> out;
  for (const auto& row : manifest.rows) {
    train::TrainUtt u;
    u.utt_id = row.utt_id;
    u.speaker_id = row.speaker_id;
    for (double factor : speed_factors(cfg)) {
      const std::string vid = variant_id(row.utt_id, factor);
      const std::string mel_path = mdir + "/" + vid + ".pmel";
      TVX_CHECK(fs::exists(mel_path))
          << "missing mel " << mel_path << ": run extract-features first";
      auto it = units.find(vid);
      TVX_CHECK(it != units.end())
          << "missing units for " << vid << ": run quantize first";
      u.factors.push_back(factor);
      u.mels.push_back(dsp::read_mel(mel_path));
      u.units.push_back(it->second);
    }
    out.push_back(std::move(u));
  }
  return out;
}

StageResult run_stage(const std::string& stage, const PipelineConfig& cfg,
                      const std::string& manifest_path) {
  check_stage_dag();
  TVX_CHECK(std::find(kStages.begin(), kStages.end(), stage) != kStages.end())
      << "unknown stage '" << stage << "'";
  require_deps(cfg, stage);

  const std::string dir = stage_dir(cfg, stage);
  std::map<std::string, uint64_t> inputs;
  inputs["manifest"] = binio::hash_file(manifest_path);
  for (const auto& d : stage_deps(stage))
    inputs["stage:" + d] = dir_hash(stage_dir(cfg, d));

  const json expected = expected_provenance(cfg, stage, inputs);
  if (provenance_matches(dir, expected))
    return {true, "up-to-date: " + stage + " (provenance unchanged)"};

  fs::create_directories(dir);
  // Archive the resolved config once per run directory.
  {
    std::ofstream os(cfg.run_dir + "/config.txt");
    os << cfg.resolved.serialize();
  }
  const Manifest manifest = load_manifest(manifest_path);

  if (stage == "extract-features")
    stage_extract_features(cfg, manifest, dir);
  else if (stage == "train-kmeans")
    stage_train_kmeans(cfg, dir);
  else if (stage == "quantize")
    stage_quantize(cfg, dir);
  else if (stage == "pretrain")
    stage_pretrain(cfg, manifest, dir);
  else if (stage == "finetune-ser")
    stage_finetune_ser(cfg, manifest, dir);
  else if (stage == "finetune-evc")
    stage_finetune_evc(cfg, manifest, dir);
  else if (stage == "convert")
    stage_convert(cfg, manifest, dir);
  else if (stage == "evaluate")
    stage_evaluate(cfg, manifest, dir);
  else if (stage == "export-embeddings")
    stage_export_embeddings(cfg, manifest, dir);
  else if (stage == "probe")
    stage_probe(cfg, manifest, dir);

  write_provenance(dir, expected);
  return {false, "completed: " + stage};
}

}  // namespace trivox::pipeline
