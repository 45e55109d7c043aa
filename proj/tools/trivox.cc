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

// Command-line workbench: toy-corpus generation, manifest validation, the
// stage pipeline, conversion, objective EVC scoring and report emission.
//
// Exit codes: 0 ok, 1 validation error, 2 missing stage dependency,
// 3 runtime error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "core/binio.h"
#include "core/check.h"
#include "core/kernels.h"
#include "dsp/griffin_lim.h"
#include "eval/evc.h"
#include "eval/metrics.h"
#include "model/checkpoint.h"
#include "pipeline/report.h"
#include "pipeline/stages.h"
#include "pipeline/toy_corpus.h"
#include "units/kmeans.h"

namespace fs = std::filesystem;
using namespace trivox;

namespace {

pipeline::PipelineConfig resolve_config(const std::string& config_path,
                                        const std::vector<std::string>& sets,
                                        int64_t seed_flag) {
  pipeline::KeyValues kv;
  if (!config_path.empty()) kv = pipeline::KeyValues::from_file(config_path);
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    TVX_CHECK(eq != std::string::npos) << "--set expects key=value, got " << s;
    kv.set(s.substr(0, eq), s.substr(eq + 1));
  }
  // Environment override for the artifact directory, then the global seed
  // flag (highest precedence).
  if (const char* env = std::getenv("TRIVOX_RUN_DIR"); env != nullptr)
    kv.set("run.dir", env);
  if (seed_flag >= 0) {
    kv.set("run.seed", std::to_string(seed_flag));
    kv.set("train.seed", std::to_string(seed_flag));
  }
  return pipeline::PipelineConfig::resolve(kv);
}

int cmd_validate_manifest(const std::string& path) {
  const auto errors = pipeline::validate_manifest(path);
  if (errors.empty()) {
    std::cout << "manifest ok: " << path << "\n";
    return 0;
  }
  for (const auto& e : errors) std::cerr << "error: " << e << "\n";
  return 1;
}

int cmd_evc_score(const std::string& target_dir, const std::string& converted_dir,
                  const std::string& out_path) {
  dsp::DspConfig dsp_cfg;
  std::ostringstream out;
  out << "utt_id,mcd_db,f0_rmse_hz\n";
  out.precision(6);
  double mcd_sum = 0.0, f0_sum = 0.0;
  int n = 0;
  std::vector<fs::path> targets;
  for (const auto& e : fs::directory_iterator(target_dir))
    if (e.path().extension() == ".wav") targets.push_back(e.path());
  std::sort(targets.begin(), targets.end());
  TVX_CHECK(!targets.empty()) << "no .wav files in " << target_dir;
  for (const auto& t : targets) {
    const std::string stem = t.stem().string();
    const fs::path conv_wav = fs::path(converted_dir) / (stem + ".wav");
    const fs::path conv_mel = fs::path(converted_dir) / (stem + ".pmel");
    TVX_CHECK(fs::exists(conv_wav) || fs::exists(conv_mel))
        << "no converted .wav or .pmel for '" << stem << "' in "
        << converted_dir;
    const auto target_wav = dsp::read_wav(t.string(), stem);
    const auto t_cep = dsp::mel_cepstra(target_wav, dsp_cfg);
    const auto t_f0 = dsp::extract_f0(target_wav, dsp_cfg);

    dsp::MelCepstra c_cep;
    dsp::PitchTrack c_f0;
    if (fs::exists(conv_wav)) {
      const auto w = dsp::read_wav(conv_wav.string(), stem);
      c_cep = dsp::mel_cepstra(w, dsp_cfg);
      c_f0 = dsp::extract_f0(w, dsp_cfg);
    } else {
      const auto m = dsp::read_mel(conv_mel.string());
      c_cep = dsp::cepstra_from_mel(m, dsp_cfg.n_cepstra);
      c_f0 = dsp::extract_f0(dsp::invert_mel(m, 60, dsp_cfg), dsp_cfg);
    }
    const double mcd = eval::mcd_db(t_cep, c_cep);
    const double f0e = eval::f0_rmse_hz(t_f0, c_f0);
    out << stem << "," << mcd << "," << f0e << "\n";
    mcd_sum += mcd;
    f0_sum += f0e;
    ++n;
  }
  out << "summary_mean," << mcd_sum / n << "," << f0_sum / n << "\n";
  if (out_path.empty()) {
    std::cout << out.str();
  } else {
    std::ofstream os(out_path);
    TVX_CHECK(os.good()) << "cannot write " << out_path;
    os << out.str();
    std::cout << "wrote " << out_path << "\n";
  }
  return 0;
}

int cmd_convert(const pipeline::PipelineConfig& cfg, const std::string& manifest_path,
                const std::string& source, const std::string& prosody_ref,
                const std::string& speaker_ref, const std::string& out_path,
                const std::string& checkpoint_override) {
  const auto manifest = pipeline::load_manifest(manifest_path);
  std::string ckpt = checkpoint_override;
  if (ckpt.empty()) {
    const std::string evc = cfg.run_dir + "/finetune-evc/best.ckpt";
    const std::string pre = cfg.run_dir + "/pretrain/best.ckpt";
    ckpt = fs::exists(evc) ? evc : pre;
    if (!fs::exists(ckpt))
      throw pipeline::MissingDependency(
          "no checkpoint under " + cfg.run_dir + ": run pretrain first");
  }
  auto m = model::load_checkpoint(ckpt);

  // Mels/units straight from the extract-features and quantize stages.
  eval::ConversionData data;
  const std::string mdir = cfg.run_dir + "/extract-features/mels";
  if (!fs::exists(mdir))
    throw pipeline::MissingDependency("missing mels: run extract-features first");
  const std::string units_path = cfg.run_dir + "/quantize/units.txt";
  if (!fs::exists(units_path))
    throw pipeline::MissingDependency("missing units: run quantize first");
  for (auto& [utt, ids] : units::load_units(units_path)) data.units[utt] = ids;
  for (const auto& row : manifest.rows) {
    data.mels[row.utt_id] = dsp::read_mel(mdir + "/" + row.utt_id + ".pmel").frames;
    data.speaker_of[row.utt_id] = row.speaker_id;
  }

  eval::ConversionRequest req{source, prosody_ref, speaker_ref};
  const auto res = eval::convert_request(*m, req, data, cfg.dsp);
  if (res.truncated)
    std::cerr << "warning: decoding hit the max-frames cap (truncated)\n";

  if (fs::path(out_path).has_parent_path())
    fs::create_directories(fs::path(out_path).parent_path());
  const std::string ext = fs::path(out_path).extension().string();
  if (ext == ".wav") {
    dsp::write_wav(out_path,
                   dsp::invert_mel(res.converted_mel, cfg.griffin_lim_iters, cfg.dsp));
  } else {
    dsp::write_mel(out_path, res.converted_mel);
  }
  std::cout << "wrote " << out_path << " (" << res.converted_mel.n_frames()
            << " frames" << (res.truncated ? ", truncated" : "") << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  TVX_CHECK(binio::host_is_little_endian()) << "big-endian hosts unsupported";
  kernels::init_mode_from_env();

  CLI::App app{"prosody-disentangling speech reconstruction workbench"};
  app.require_subcommand(1);
  int64_t seed_flag = -1;
  app.add_option("--seed", seed_flag, "global seed override for all stages");

  std::string manifest_path, config_path, run_dir_flag;
  std::vector<std::string> sets;

  auto add_cfg_opts = [&](CLI::App* sub, bool need_manifest) {
    if (need_manifest)
      sub->add_option("--manifest", manifest_path, "corpus manifest")->required();
    sub->add_option("--config", config_path, "key-value config file");
    sub->add_option("--set", sets, "config override key=value (repeatable)");
    sub->add_option("--run-dir", run_dir_flag, "artifact directory (overrides run.dir)");
  };

  // validate-manifest
  auto* vsub = app.add_subcommand("validate-manifest", "parse and check a manifest");
  std::string vpath;
  vsub->add_option("path", vpath, "manifest file")->required();

  // toy-corpus
  auto* tsub = app.add_subcommand("toy-corpus", "generate the synthetic corpus");
  pipeline::ToyCorpusSpec toy;
  std::string toy_out = "toy";
  tsub->add_option("--out", toy_out, "output directory");
  tsub->add_option("--sessions", toy.n_sessions, "number of sessions");
  tsub->add_option("--speakers-per-session", toy.speakers_per_session,
                   "speakers per session");
  tsub->add_option("--utts-per-speaker", toy.utts_per_speaker,
                   "utterances per speaker");
  tsub->add_option("--duration", toy.duration_s, "base duration in seconds");
  tsub->add_option("--emotion-strength", toy.emotion_strength,
                   "0 disables emotion-dependent prosody");
  tsub->add_option("--corpus-seed", toy.seed, "corpus generator seed");
  bool toy_same_voice = false;
  tsub->add_flag("--shared-voice", toy_same_voice,
                 "all speakers share one voice (speaker-independence probes)");

  // run <stage>
  auto* rsub = app.add_subcommand("run", "run one pipeline stage");
  std::string stage;
  rsub->add_option("stage", stage, "one of the pipeline stages")->required();
  add_cfg_opts(rsub, true);

  // convert
  auto* csub = app.add_subcommand("convert", "prosody-swapped conversion");
  std::string src, pref, spkref, out_path = "converted.pmel", ckpt_path;
  csub->add_option("--source", src, "source utterance id")->required();
  csub->add_option("--prosody-ref", pref, "prosody reference utterance id")->required();
  csub->add_option("--speaker-ref", spkref, "speaker reference utterance id");
  csub->add_option("--out", out_path, "output path (.pmel or .wav)");
  csub->add_option("--checkpoint", ckpt_path, "checkpoint override");
  add_cfg_opts(csub, true);

  // evc-score
  auto* esub = app.add_subcommand("evc-score", "objective conversion metrics");
  std::string target_dir, converted_dir, score_out;
  esub->add_option("--target-dir", target_dir, "reference .wav directory")->required();
  esub->add_option("--converted-dir", converted_dir,
                   "converted .wav/.pmel directory")->required();
  esub->add_option("--out", score_out, "CSV output path (default stdout)");

  // report
  auto* psub = app.add_subcommand("report", "collate run artifacts");
  std::string report_run_dir;
  psub->add_option("--run-dir", report_run_dir, "run directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (vsub->parsed()) return cmd_validate_manifest(vpath);
    if (tsub->parsed()) {
      toy.speaker_dependent_voice = !toy_same_voice;
      const auto m = pipeline::generate_toy_corpus(toy, toy_out);
      std::cout << "wrote " << m.rows.size() << " utterances under " << toy_out
                << "\n";
      return 0;
    }
    if (!run_dir_flag.empty()) sets.push_back("run.dir=" + run_dir_flag);
    if (rsub->parsed()) {
      const auto cfg = resolve_config(config_path, sets, seed_flag);
      const auto res = pipeline::run_stage(stage, cfg, manifest_path);
      std::cout << res.message << "\n";
      return 0;
    }
    if (csub->parsed()) {
      const auto cfg = resolve_config(config_path, sets, seed_flag);
      return cmd_convert(cfg, manifest_path, src, pref, spkref, out_path,
                         ckpt_path);
    }
    if (esub->parsed()) return cmd_evc_score(target_dir, converted_dir, score_out);
    if (psub->parsed()) {
      const auto res = pipeline::emit_report(report_run_dir);
      std::cout << "wrote " << res.summary_path;
      if (!res.missing.empty())
        std::cout << " (" << res.missing.size() << " artifacts missing)";
      std::cout << "\n";
      return 0;
    }
  } catch (const pipeline::MissingDependency& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
