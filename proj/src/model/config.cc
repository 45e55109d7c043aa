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

#include "model/config.h"

#include <sstream>
#include <vector>

#include "core/check.h"

namespace trivox::model {

namespace {
struct Field {
  const char* key;
  int ModelConfig::*ip = nullptr;
  uint64_t ModelConfig::*up = nullptr;
  double ModelConfig::*dp = nullptr;
};

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      {"vocab_size", &ModelConfig::vocab_size},
      {"unit_embed_dim", &ModelConfig::unit_embed_dim},
      {"u2v_conv_channels", &ModelConfig::u2v_conv_channels},
      {"u2v_conv_kernel", &ModelConfig::u2v_conv_kernel},
      {"u2v_bilstm_hidden", &ModelConfig::u2v_bilstm_hidden},
      {"unit_repr_dim", &ModelConfig::unit_repr_dim},
      {"speaker_dim", &ModelConfig::speaker_dim},
      {"prosody_dim", &ModelConfig::prosody_dim},
      {"ecapa_channels", &ModelConfig::ecapa_channels},
      {"ecapa_tdnn_kernel", &ModelConfig::ecapa_tdnn_kernel},
      {"ecapa_block_kernel", &ModelConfig::ecapa_block_kernel},
      {"ecapa_res2_scale", &ModelConfig::ecapa_res2_scale},
      {"ecapa_combiner_channels", &ModelConfig::ecapa_combiner_channels},
      {"ecapa_se_bottleneck", &ModelConfig::ecapa_se_bottleneck},
      {"ecapa_asp_bottleneck", &ModelConfig::ecapa_asp_bottleneck},
      {"embed_proj_dim", &ModelConfig::embed_proj_dim},
      {"attn_lstm_dim", &ModelConfig::attn_lstm_dim},
      {"attn_query_dim", &ModelConfig::attn_query_dim},
      {"attn_memory_dim", &ModelConfig::attn_memory_dim},
      {"attn_location_channels", &ModelConfig::attn_location_channels},
      {"attn_location_kernel", &ModelConfig::attn_location_kernel},
      {"attn_location_dim", &ModelConfig::attn_location_dim},
      {"prenet_dim", &ModelConfig::prenet_dim},
      {"decoder_lstm_dim", &ModelConfig::decoder_lstm_dim},
      {"n_mel", &ModelConfig::n_mel},
      {"init_seed", nullptr, &ModelConfig::init_seed},
      {"prenet_dropout", nullptr, nullptr, &ModelConfig::prenet_dropout},
      {"max_frames_ratio", nullptr, nullptr, &ModelConfig::max_frames_ratio},
  };
  return f;
}
}  // namespace

int ModelConfig::min_style_frames() const {
  int rf = ecapa_tdnn_kernel;
  for (int d : ecapa_dilations) rf += (ecapa_block_kernel - 1) * d;
  return rf;
}

ModelConfig ModelConfig::scaled(int k) const {
  auto div = [k](int v, const char* what) {
    TVX_CHECK(v % k == 0) << what << " = " << v << " not divisible by " << k;
    return v / k;
  };
  ModelConfig s = *this;
  s.unit_embed_dim = div(unit_embed_dim, "unit_embed_dim");
  s.u2v_conv_channels = div(u2v_conv_channels, "u2v_conv_channels");
  s.u2v_bilstm_hidden = div(u2v_bilstm_hidden, "u2v_bilstm_hidden");
  s.unit_repr_dim = div(unit_repr_dim, "unit_repr_dim");
  s.speaker_dim = div(speaker_dim, "speaker_dim");
  s.prosody_dim = div(prosody_dim, "prosody_dim");
  s.ecapa_channels = div(ecapa_channels, "ecapa_channels");
  s.ecapa_combiner_channels = div(ecapa_combiner_channels, "ecapa_combiner");
  s.ecapa_se_bottleneck = div(ecapa_se_bottleneck, "ecapa_se_bottleneck");
  s.ecapa_asp_bottleneck = div(ecapa_asp_bottleneck, "ecapa_asp_bottleneck");
  s.embed_proj_dim = div(embed_proj_dim, "embed_proj_dim");
  s.attn_lstm_dim = div(attn_lstm_dim, "attn_lstm_dim");
  s.attn_query_dim = div(attn_query_dim, "attn_query_dim");
  s.attn_memory_dim = div(attn_memory_dim, "attn_memory_dim");
  s.attn_location_channels = div(attn_location_channels, "attn_location_channels");
  s.attn_location_dim = div(attn_location_dim, "attn_location_dim");
  s.prenet_dim = div(prenet_dim, "prenet_dim");
  s.decoder_lstm_dim = div(decoder_lstm_dim, "decoder_lstm_dim");
  s.validate();
  return s;
}

void ModelConfig::validate() const {
  for (const auto& f : fields())
    if (f.ip != nullptr)
      TVX_CHECK(this->*(f.ip) > 0) << "non-positive config field " << f.key;
  TVX_CHECK(ecapa_channels % ecapa_res2_scale == 0)
      << "res2 scale must divide ecapa channels";
  TVX_CHECK(prenet_dropout >= 0.0 && prenet_dropout < 1.0) << "bad dropout";
  TVX_CHECK(max_frames_ratio >= 1.0) << "bad max_frames_ratio";
}

std::string ModelConfig::serialize() const {
  std::ostringstream os;
  os.precision(17);
  for (const auto& f : fields()) {
    os << f.key << "=";
    if (f.ip != nullptr)
      os << this->*(f.ip);
    else if (f.up != nullptr)
      os << this->*(f.up);
    else
      os << this->*(f.dp);
    os << "\n";
  }
  os << "ecapa_dilations=" << ecapa_dilations[0] << "," << ecapa_dilations[1]
     << "," << ecapa_dilations[2] << "\n";
  return os.str();
}

ModelConfig ModelConfig::deserialize(const std::string& text) {
  ModelConfig cfg;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    TVX_CHECK(eq != std::string::npos) << "bad config line: " << line;
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "ecapa_dilations") {
      std::istringstream vs(value);
      char comma;
      vs >> cfg.ecapa_dilations[0] >> comma >> cfg.ecapa_dilations[1] >> comma >>
          cfg.ecapa_dilations[2];
      continue;
    }
    bool known = false;
    for (const auto& f : fields()) {
      if (key != f.key) continue;
      known = true;
      if (f.ip != nullptr)
        cfg.*(f.ip) = std::stoi(value);
      else if (f.up != nullptr)
        cfg.*(f.up) = std::stoull(value);
      else
        cfg.*(f.dp) = std::stod(value);
      break;
    }
    TVX_CHECK(known) << "unknown model config key: " << key;
  }
  cfg.validate();
  return cfg;
}

}  // namespace trivox::model
