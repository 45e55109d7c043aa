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

#ifndef TRIVOX_MODEL_CONFIG_H_
#define TRIVOX_MODEL_CONFIG_H_

#include <array>
#include <cstdint>
#include <string>

namespace trivox::model {

// Full-size architecture. The desk preset divides every channel width by 4
// (identical topology) so training runs in minutes on a CPU; scale(16) is
// the miniature used by the gradient check.
struct ModelConfig {
  int vocab_size = 200;

  // Unit-to-vector stack: embedding, three conv layers, BiLSTM, projection.
  int unit_embed_dim = 512;
  int u2v_conv_channels = 512;
  int u2v_conv_kernel = 5;  // stride 1, same padding
  int u2v_bilstm_hidden = 256;  // per direction
  int unit_repr_dim = 256;

  // Style encoders (speaker frozen, prosody trainable).
  int speaker_dim = 192;
  int prosody_dim = 192;
  int ecapa_channels = 1024;
  int ecapa_tdnn_kernel = 5;
  int ecapa_block_kernel = 3;
  std::array<int, 3> ecapa_dilations{2, 3, 4};
  int ecapa_res2_scale = 8;
  int ecapa_combiner_channels = 1536;
  int ecapa_se_bottleneck = 128;
  int ecapa_asp_bottleneck = 128;

  // Attention and decoder. The attention LSTM consumes the prenet output
  // concatenated with the previous context; the memory carries the unit
  // representation plus both projected style embeddings, which makes the
  // LSTM input width equal attn_lstm_dim at the defaults.
  int embed_proj_dim = 448;
  int attn_lstm_dim = 1408;
  int attn_query_dim = 128;
  int attn_memory_dim = 128;
  int attn_location_channels = 32;
  int attn_location_kernel = 31;  // pad 15
  int attn_location_dim = 128;
  int prenet_dim = 256;  // two FC layers
  double prenet_dropout = 0.5;  // active at train and inference time
  int decoder_lstm_dim = 1024;
  int n_mel = 80;
  double max_frames_ratio = 3.0;  // free-running cap vs prosody ref length

  uint64_t init_seed = 1234;

  int memory_dim() const { return unit_repr_dim + 2 * embed_proj_dim; }
  int style_dim(bool speaker) const { return speaker ? speaker_dim : prosody_dim; }
  // Frames a style encoder needs to cover its conv receptive field.
  int min_style_frames() const;

  // Divides all channel widths by k, keeping kernels and topology. Throws
  // if any width is not divisible.
  ModelConfig scaled(int k) const;

  // Canonical key=value text; checkpoints embed it and loaders compare it.
  std::string serialize() const;
  static ModelConfig deserialize(const std::string& text);

  void validate() const;
};

inline ModelConfig desk_preset(int vocab_size) {
  ModelConfig cfg;
  ModelConfig desk = cfg.scaled(4);
  desk.vocab_size = vocab_size;
  return desk;
}

}  // namespace trivox::model

#endif  // TRIVOX_MODEL_CONFIG_H_
