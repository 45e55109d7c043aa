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

#include "eval/evc.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/check.h"
#include "eval/pca.h"
#include "units/features.h"

namespace trivox::eval {

using model::StyleRole;
using nn::Binder;
using nn::Fwd;
using nn::Graph;
using nn::Var;

ConversionResult convert(const model::Reconstructor<float>& m,
                         const std::vector<int>& source_units,
                         const TensorF& speaker_ref_mel,
                         const TensorF& prosody_ref_mel,
                         const dsp::DspConfig& dsp_cfg) {
  Graph<float> g(false);
  Binder<float> bind(g);
  Rng rng(Rng::mix(m.cfg().init_seed, 0xc0d3));
  Fwd<float> f{g, bind, rng, /*training=*/false};

  Var<float> units = m.encode_units(f, source_units);
  Var<float> spk = m.encode_style(f, g.leaf(&speaker_ref_mel, false),
                                  StyleRole::kSpeaker);
  Var<float> pro = m.encode_style(f, g.leaf(&prosody_ref_mel, false),
                                  StyleRole::kProsody);
  const int max_frames =
      int(m.cfg().max_frames_ratio * double(prosody_ref_mel.rows)) + 1;
  auto dec = m.decode(f, units, spk, pro, /*teacher=*/nullptr,
                      /*sampling_prob=*/0.0, max_frames);

  ConversionResult res;
  res.converted_mel.frames = dec.mel;
  res.converted_mel.sample_rate = dsp_cfg.sample_rate;
  res.converted_mel.hop_samples = dsp_cfg.hop_samples;
  res.converted_mel.win_samples = dsp_cfg.win_samples;
  res.converted_mel.n_fft = dsp_cfg.n_fft;
  res.converted_mel.log_floor = float(dsp_cfg.log_floor());
  res.alignments = dec.alignments;
  res.truncated = dec.truncated;
  return res;
}

ConversionResult convert_request(const model::Reconstructor<float>& m,
                                 const ConversionRequest& req,
                                 const ConversionData& data,
                                 const dsp::DspConfig& dsp_cfg) {
  auto mel_of = [&](const std::string& utt) -> const TensorF& {
    auto it = data.mels.find(utt);
    TVX_CHECK(it != data.mels.end()) << "unknown utterance '" << utt << "'";
    return it->second;
  };
  auto units_it = data.units.find(req.source_utt);
  TVX_CHECK(units_it != data.units.end())
      << "no unit sequence for source '" << req.source_utt << "'";

  std::string spk_ref = req.speaker_ref_utt;
  if (spk_ref.empty()) {
    // Default: another utterance of the source speaker, else the source.
    const auto spk_it = data.speaker_of.find(req.source_utt);
    TVX_CHECK(spk_it != data.speaker_of.end())
        << "no speaker for '" << req.source_utt << "'";
    spk_ref = req.source_utt;
    for (const auto& [utt, spk] : data.speaker_of)
      if (utt != req.source_utt && spk == spk_it->second) {
        spk_ref = utt;
        break;
      }
  }
  return convert(m, units_it->second, mel_of(spk_ref),
                 mel_of(req.prosody_ref_utt), dsp_cfg);
}

train::TrainConfig evc_finetune_config(train::TrainConfig base) {
  base.schedule = train::LrSchedule::kFixed;
  base.fixed_lr = 1e-5;
  return base;
}

void write_embedding_file(const std::string& path,
                          const std::map<std::string, std::vector<float>>& rows) {
  std::ofstream os(path);
  TVX_CHECK(os.good()) << "cannot write " << path;
  char buf[32];
  for (const auto& [utt, vals] : rows) {
    os << utt << "|";
    for (size_t i = 0; i < vals.size(); ++i) {
      // max_digits10 for float: text round-trips bit-exactly.
      std::snprintf(buf, sizeof buf, "%.9g", double(vals[i]));
      os << (i ? " " : "") << buf;
    }
    os << "\n";
  }
}

std::map<std::string, std::vector<float>> read_embedding_file(
    const std::string& path) {
  std::ifstream is(path);
  TVX_CHECK(is.good()) << "cannot read " << path;
  std::map<std::string, std::vector<float>> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto bar = line.find('|');
    TVX_CHECK(bar != std::string::npos) << path << ": missing '|'";
    std::istringstream vs(line.substr(bar + 1));
    std::vector<float> vals;
    float v;
    while (vs >> v) vals.push_back(v);
    out[line.substr(0, bar)] = std::move(vals);
  }
  return out;
}

void export_embeddings(const model::Reconstructor<float>& m,
                       const std::map<std::string, TensorF>& mels,
                       const std::map<std::string, std::vector<int>>& units,
                       const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  fs::create_directories(out_dir + "/frames");

  std::map<std::string, std::vector<float>> pro_rows, spk_rows, unit_rows;
  std::ofstream pca_csv(out_dir + "/pca_trace.csv");
  TVX_CHECK(pca_csv.good()) << "cannot write pca_trace.csv";
  pca_csv << "utt_id,frame,projection\n";
  pca_csv.precision(9);

  for (const auto& [utt, mel] : mels) {
    Graph<float> g(false);
    Binder<float> bind(g);
    Rng rng(0xeead);
    Fwd<float> f{g, bind, rng, false};
    Var<float> mv = g.leaf(&mel, false);

    Var<float> act = m.style_frame_activations(f, mv, StyleRole::kProsody);
    const TensorF& A = g.val(act);
    units::FrameFeatures ff;
    ff.mat = A;
    ff.utt_id = utt;
    units::save_features(out_dir + "/frames/" + utt + ".pfea", ff);

    const auto p1 = pca_project_1d(A);
    for (size_t t = 0; t < p1.projection.size(); ++t)
      pca_csv << utt << "," << t << "," << p1.projection[t] << "\n";

    auto to_vec = [&](Var<float> v) {
      const TensorF& t = g.val(v);
      return std::vector<float>(t.v.begin(), t.v.end());
    };
    // Reuse the frame activations graph for the pooled embeddings.
    pro_rows[utt] = to_vec(m.encode_style(f, mv, StyleRole::kProsody));
    spk_rows[utt] = to_vec(m.encode_style(f, mv, StyleRole::kSpeaker));

    const auto uit = units.find(utt);
    if (uit != units.end() && !uit->second.empty()) {
      Var<float> enc = m.encode_units(f, uit->second);
      unit_rows[utt] = to_vec(f.g.mean_rows(enc));  // time-mean sentence level
    }
  }
  write_embedding_file(out_dir + "/prosody_embeddings.txt", pro_rows);
  write_embedding_file(out_dir + "/speaker_embeddings.txt", spk_rows);
  write_embedding_file(out_dir + "/unit_embeddings.txt", unit_rows);
}

}  // namespace trivox::eval
