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

#ifndef TRIVOX_MODEL_RECONSTRUCTOR_H_
#define TRIVOX_MODEL_RECONSTRUCTOR_H_

#include <string>
#include <vector>

#include "core/binio.h"
#include "model/model.h"

namespace trivox::model {

enum class StyleRole { kSpeaker, kProsody };

// The full reconstruction model: semantic units, a frozen speaker encoder
// and a trainable prosody encoder feed an attention decoder that emits
// 80-channel mel frames. Instances are safe to share read-only across
// threads; training mutates parameters single-writer.
template <typename T>
class Reconstructor {
 public:
  explicit Reconstructor(const ModelConfig& cfg)
      : cfg_(cfg),
        params_(cfg.init_seed),
        u2v_(params_, cfg),
        speaker_enc_(params_, "spk", cfg, cfg.speaker_dim),
        prosody_enc_(params_, "pro", cfg, cfg.prosody_dim),
        unit_proj_(params_, "cond.unit_proj", 2 * cfg.u2v_bilstm_hidden,
                   cfg.unit_repr_dim),
        spk_proj_(params_, "cond.spk_proj", cfg.speaker_dim, cfg.embed_proj_dim),
        pro_proj_(params_, "cond.pro_proj", cfg.prosody_dim, cfg.embed_proj_dim),
        decoder_(params_, cfg) {
    cfg.validate();
    // The speaker encoder stands in for an externally pretrained model and
    // never trains.
    params_.set_trainable("spk.", false);
  }

  const ModelConfig& cfg() const { return cfg_; }
  nn::ParamStore<T>& params() { return params_; }
  const nn::ParamStore<T>& params() const { return params_; }

  // [L, 2*bilstm_hidden] per refined-unit step.
  Var<T> encode_units(Fwd<T>& f, const std::vector<int>& ids) const {
    for (int id : ids)
      TVX_CHECK(0 <= id && id < cfg_.vocab_size)
          << "unit id " << id << " out of vocabulary (N=" << cfg_.vocab_size
          << ")";
    return u2v_.forward(f, ids);
  }

  Var<T> encode_style(Fwd<T>& f, Var<T> mel, StyleRole role) const {
    TVX_CHECK(f.g.val(mel).cols == cfg_.n_mel)
        << "style encoder expects " << cfg_.n_mel << " mel channels, got "
        << f.g.val(mel).cols;
    return role == StyleRole::kSpeaker ? speaker_enc_.forward(f, mel)
                                       : prosody_enc_.forward(f, mel);
  }

  Var<T> style_frame_activations(Fwd<T>& f, Var<T> mel, StyleRole role) const {
    return role == StyleRole::kSpeaker
               ? speaker_enc_.frame_activations(f, mel)
               : prosody_enc_.frame_activations(f, mel);
  }

  // Attention memory: projected unit steps with both projected style
  // embeddings broadcast to every step.
  Var<T> build_memory(Fwd<T>& f, Var<T> unit_enc, Var<T> spk_emb,
                      Var<T> pro_emb) const {
    TVX_CHECK(f.g.val(spk_emb).cols == cfg_.speaker_dim)
        << "speaker embedding width mismatch";
    TVX_CHECK(f.g.val(pro_emb).cols == cfg_.prosody_dim)
        << "prosody embedding width mismatch";
    const int L = f.g.val(unit_enc).rows;
    Var<T> units = unit_proj_.forward(f, unit_enc);
    Var<T> spk = f.g.broadcast_row(spk_proj_.forward(f, spk_emb), L);
    Var<T> pro = f.g.broadcast_row(pro_proj_.forward(f, pro_emb), L);
    return f.g.concat_cols({units, spk, pro});
  }

  DecodeResult<T> decode(Fwd<T>& f, Var<T> unit_enc, Var<T> spk_emb,
                         Var<T> pro_emb, const Tensor<T>* teacher,
                         double sampling_prob, int max_frames) const {
    if (teacher != nullptr)
      TVX_CHECK(teacher->cols == cfg_.n_mel) << "teacher mel width mismatch";
    Var<T> memory = build_memory(f, unit_enc, spk_emb, pro_emb);
    return decoder_.decode(f, memory, teacher, sampling_prob, max_frames);
  }

  // Full composition used by training: units + same-speaker reference +
  // prosody reference (the content mel itself during pretraining).
  DecodeResult<T> reconstruct(Fwd<T>& f, const std::vector<int>& unit_ids,
                              const Tensor<T>& speaker_ref_mel,
                              const Tensor<T>& prosody_mel,
                              const Tensor<T>* teacher,
                              double sampling_prob) const {
    Var<T> spk_in = f.g.constant(speaker_ref_mel);
    Var<T> pro_in = f.g.constant(prosody_mel);
    Var<T> units = encode_units(f, unit_ids);
    Var<T> spk = encode_style(f, spk_in, StyleRole::kSpeaker);
    Var<T> pro = encode_style(f, pro_in, StyleRole::kProsody);
    const int max_frames =
        int(cfg_.max_frames_ratio * double(prosody_mel.rows)) + 1;
    return decode(f, units, spk, pro, teacher, sampling_prob, max_frames);
  }

  // FNV hash of the raw speaker-encoder bytes; the freeze contract checks
  // this stays constant across training.
  uint64_t speaker_checksum() const {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& p : params_.all())
      if (p->name.rfind("spk.", 0) == 0)
        h = binio::fnv1a(p->value.data(), size_t(p->value.size()) * sizeof(T), h);
    return h;
  }

 private:
  ModelConfig cfg_;
  nn::ParamStore<T> params_;
  UnitEncoder<T> u2v_;
  StyleEncoder<T> speaker_enc_, prosody_enc_;
  nn::Linear<T> unit_proj_, spk_proj_, pro_proj_;
  Decoder<T> decoder_;
};

}  // namespace trivox::model

#endif  // TRIVOX_MODEL_RECONSTRUCTOR_H_
