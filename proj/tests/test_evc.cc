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

#include "eval/evc.h"
#include "model/checkpoint.h"
#include "pipeline/toy_corpus.h"
#include "train/trainer.h"
#include "units/features.h"
#include "units/kmeans.h"

using namespace trivox;
namespace fs = std::filesystem;

namespace {

struct EvcFixture {
  std::vector<train::TrainUtt> utts;
  eval::ConversionData data;
  dsp::DspConfig dsp_cfg;
  model::ModelConfig model_cfg;

  EvcFixture() {
    pipeline::ToyCorpusSpec spec;
    spec.speakers_per_session = 2;
    spec.utts_per_speaker = 3;
    spec.duration_s = 0.5;
    spec.duration_jitter = 0.05;
    spec.seed = 31;
    std::vector<units::FrameFeatures> feats;
    for (int sp = 0; sp < 2; ++sp)
      for (int u = 0; u < 3; ++u) {
        const auto w = pipeline::toy_utterance(
            spec, 0, sp, u, u == 0 ? "neutral" : (u == 1 ? "angry" : "sad"));
        train::TrainUtt t;
        t.utt_id = "s" + std::to_string(sp) + "u" + std::to_string(u);
        t.speaker_id = "s" + std::to_string(sp);
        t.factors = {1.0};
        t.mels.push_back(dsp::compute_mel(w, dsp_cfg));
        auto f = units::mfcc_fallback(w, dsp_cfg);
        f.utt_id = t.utt_id;
        feats.push_back(f);
        utts.push_back(std::move(t));
      }
    const auto cb = units::train_codebook(feats, 8, 3);
    for (size_t i = 0; i < utts.size(); ++i) {
      utts[i].units.push_back(units::refine(units::quantize(feats[i], cb)).ids);
      data.mels[utts[i].utt_id] = utts[i].mels[0].frames;
      data.units[utts[i].utt_id] = utts[i].units[0];
      data.speaker_of[utts[i].utt_id] = utts[i].speaker_id;
    }
    model_cfg = model::ModelConfig().scaled(16);
    model_cfg.vocab_size = 8;
  }
};

}  // namespace

TEST_CASE("evc fine-tuning: fixed 1e-5 LR, frozen speaker, val regression") {
  const auto dir = fs::temp_directory_path() / "trivox_evc_test";
  fs::remove_all(dir);
  EvcFixture fx;

  // Short pretraining run.
  train::TrainConfig pre;
  pre.batch_size = 2;
  pre.warmup_steps = 10;
  pre.max_steps = 120;
  pre.eval_every = 40;
  pre.val_count = 1;
  pre.seed = 3;
  model::Reconstructor<float> m(fx.model_cfg);
  train::Trainer pretrainer(m, pre);
  dsp::AugmentSpec aug;
  pretrainer.pretrain(fx.utts, aug, (dir / "pre").string());

  // Fine-tune continues the same objective at a fixed LR of exactly 1e-5.
  train::TrainConfig ft = eval::evc_finetune_config(pre);
  ft.max_steps = 60;
  ft.eval_every = 20;
  CHECK(ft.schedule == train::LrSchedule::kFixed);
  for (int s : {0, 1, 30, 59}) CHECK(train::lr_at(s, ft) == 1e-5);

  auto m2 = model::load_checkpoint((dir / "pre" / "best.ckpt").string());
  const uint64_t frozen = m2->speaker_checksum();
  train::Trainer finetuner(*m2, ft);

  auto [train_utts, val_utts] = train::split_validation(fx.utts, 1, ft.seed);
  const auto val_samples = train::make_eval_samples(val_utts);
  const double val_before = finetuner.validation_mse(val_samples);
  finetuner.pretrain(fx.utts, aug, (dir / "ft").string());
  const double val_after = finetuner.validation_mse(val_samples);

  CHECK(m2->speaker_checksum() == frozen);
  CHECK(val_after <= val_before * 1.10);  // no >10% relative regression
  for (const auto& row : finetuner.curve()) CHECK(row.lr == 1e-5);
}

TEST_CASE("conversion: prosody reference changes the output, speaker default") {
  EvcFixture fx;
  model::Reconstructor<float> m(fx.model_cfg);

  eval::ConversionRequest req;
  req.source_utt = "s0u0";
  req.prosody_ref_utt = "s0u1";
  const auto a = eval::convert_request(m, req, fx.data, fx.dsp_cfg);
  req.prosody_ref_utt = "s1u2";
  const auto b = eval::convert_request(m, req, fx.data, fx.dsp_cfg);
  const int frames = std::min(a.converted_mel.n_frames(), b.converted_mel.n_frames());
  REQUIRE(frames > 0);
  double diff = 0.0;
  for (int t = 0; t < frames; ++t)
    for (int c = 0; c < 80; ++c)
      diff += std::abs(double(a.converted_mel.frames.at(t, c)) -
                       double(b.converted_mel.frames.at(t, c)));
  CHECK(diff / (frames * 80.0) > 1e-6);  // different refs, different mels

  // Unknown ids are structured errors.
  req.prosody_ref_utt = "nope";
  CHECK_THROWS_AS(eval::convert_request(m, req, fx.data, fx.dsp_cfg), Error);
  req.source_utt = "nope";
  req.prosody_ref_utt = "s0u1";
  CHECK_THROWS_AS(eval::convert_request(m, req, fx.data, fx.dsp_cfg), Error);
}

TEST_CASE("export_embeddings writes every declared artifact") {
  const auto dir = fs::temp_directory_path() / "trivox_evc_export";
  fs::remove_all(dir);
  EvcFixture fx;
  model::Reconstructor<float> m(fx.model_cfg);
  eval::export_embeddings(m, fx.data.mels, fx.data.units, dir.string());
  CHECK(fs::exists(dir / "prosody_embeddings.txt"));
  CHECK(fs::exists(dir / "speaker_embeddings.txt"));
  CHECK(fs::exists(dir / "unit_embeddings.txt"));
  CHECK(fs::exists(dir / "pca_trace.csv"));
  const auto pro = eval::read_embedding_file((dir / "prosody_embeddings.txt").string());
  CHECK(pro.size() == fx.data.mels.size());
  CHECK(pro.begin()->second.size() == size_t(fx.model_cfg.prosody_dim));
  const auto uemb = eval::read_embedding_file((dir / "unit_embeddings.txt").string());
  CHECK(uemb.begin()->second.size() == size_t(2 * fx.model_cfg.u2v_bilstm_hidden));
  // Per-frame pre-pooling activations exist per utterance.
  for (const auto& [utt, _] : fx.data.mels)
    CHECK(fs::exists(dir / "frames" / (utt + ".pfea")));
}
