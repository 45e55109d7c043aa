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

#ifndef TRIVOX_MODEL_MODEL_H_
#define TRIVOX_MODEL_MODEL_H_

#include <string>
#include <vector>

#include "model/config.h"
#include "nn/layers.h"

namespace trivox::model {

using nn::Binder;
using nn::Fwd;
using nn::Graph;
using nn::Var;

// Unit2Vec: embedding -> three 1-D convolutions -> BiLSTM. Output width is
// twice the BiLSTM hidden size per refined-unit step.
template <typename T>
struct UnitEncoder {
  nn::Param<T>* embed = nullptr;  // [N, E]
  std::vector<nn::Conv1d<T>> convs;
  nn::BiLstm<T> bilstm;

  UnitEncoder() = default;
  UnitEncoder(nn::ParamStore<T>& ps, const ModelConfig& cfg) {
    embed = ps.weight("u2v.embed", cfg.vocab_size, cfg.unit_embed_dim,
                      cfg.unit_embed_dim);
    const int k = cfg.u2v_conv_kernel;
    int in = cfg.unit_embed_dim;
    for (int i = 0; i < 3; ++i) {
      convs.emplace_back(ps, "u2v.conv" + std::to_string(i + 1), in,
                         cfg.u2v_conv_channels, k, 1, (k - 1) / 2);
      in = cfg.u2v_conv_channels;
    }
    bilstm = nn::BiLstm<T>(ps, "u2v.bilstm", in, cfg.u2v_bilstm_hidden);
  }

  // ids (refined, deduplicated) -> [L, 2 * bilstm_hidden]
  Var<T> forward(Fwd<T>& f, const std::vector<int>& ids) const {
    TVX_CHECK(!ids.empty()) << "cannot encode an empty unit sequence";
    Var<T> x = f.g.embedding(f.bind(embed), ids);
    for (const auto& c : convs) x = f.g.relu(c.forward(f, x));
    return bilstm.forward(f, x);
  }
};

// ECAPA-style utterance encoder: TDNN, three SE-Res2Blocks with dilations
// 2/3/4, a combiner conv over the concatenated block outputs, attentive
// statistics pooling and a final FC to the embedding size.
template <typename T>
struct StyleEncoder {
  nn::Conv1d<T> tdnn;
  std::vector<nn::SeRes2Block<T>> blocks;
  nn::Conv1d<T> combiner;
  nn::AttentiveStatsPooling<T> asp;
  nn::Linear<T> fc;
  int min_frames = 1;

  StyleEncoder() = default;
  StyleEncoder(nn::ParamStore<T>& ps, const std::string& prefix,
               const ModelConfig& cfg, int out_dim) {
    const int C = cfg.ecapa_channels;
    tdnn = nn::Conv1d<T>(ps, prefix + ".tdnn", cfg.n_mel, C,
                         cfg.ecapa_tdnn_kernel, 1, (cfg.ecapa_tdnn_kernel - 1) / 2);
    for (int i = 0; i < 3; ++i)
      blocks.emplace_back(ps, prefix + ".block" + std::to_string(i + 1), C,
                          cfg.ecapa_block_kernel, cfg.ecapa_dilations[size_t(i)],
                          cfg.ecapa_res2_scale, cfg.ecapa_se_bottleneck);
    combiner = nn::Conv1d<T>(ps, prefix + ".combiner", 3 * C,
                             cfg.ecapa_combiner_channels, 1, 1, 0);
    asp = nn::AttentiveStatsPooling<T>(ps, prefix + ".asp",
                                       cfg.ecapa_combiner_channels,
                                       cfg.ecapa_asp_bottleneck);
    fc = nn::Linear<T>(ps, prefix + ".fc", 2 * cfg.ecapa_combiner_channels,
                       out_dim);
    min_frames = cfg.min_style_frames();
  }

  // Pre-pooling activations, [Tlen, combiner_channels].
  Var<T> frame_activations(Fwd<T>& f, Var<T> mel) const {
    TVX_CHECK(f.g.val(mel).rows >= min_frames)
        << "style encoder input has " << f.g.val(mel).rows
        << " frames, needs at least " << min_frames;
    Var<T> h = f.g.relu(tdnn.forward(f, mel));
    std::vector<Var<T>> outs;
    for (const auto& b : blocks) {
      h = b.forward(f, h);
      outs.push_back(h);
    }
    return f.g.relu(combiner.forward(f, f.g.concat_cols(outs)));
  }

  // mel [Tlen, n_mel] -> [1, out_dim]
  Var<T> forward(Fwd<T>& f, Var<T> mel) const {
    return fc.forward(f, asp.forward(f, frame_activations(f, mel)));
  }
};

template <typename T>
struct DecodeResult {
  Tensor<T> mel;          // [T_out, n_mel]
  Tensor<T> alignments;   // [T_out, L], rows sum to 1
  Tensor<T> stop_logits;  // [T_out, 1]
  bool truncated = false;
  Var<T> mel_var{};   // valid while the graph is recording
  Var<T> stop_var{};
};

// Tacotron2-flavored autoregressive decoder with location-aware attention.
template <typename T>
struct Decoder {
  nn::Linear<T> prenet1, prenet2;
  nn::LstmCell<T> attn_lstm, dec_lstm;
  nn::Linear<T> query_fc, memory_fc, location_fc, weight_fc;
  nn::Conv1d<T> location_conv;
  nn::Linear<T> proj, stop_fc;
  ModelConfig cfg;

  Decoder() = default;
  Decoder(nn::ParamStore<T>& ps, const ModelConfig& c) : cfg(c) {
    TVX_CHECK(cfg.attn_query_dim == cfg.attn_memory_dim &&
              cfg.attn_query_dim == cfg.attn_location_dim)
        << "attention projections must share one width";
    const int M = cfg.memory_dim();
    prenet1 = nn::Linear<T>(ps, "dec.prenet1", cfg.n_mel, cfg.prenet_dim);
    prenet2 = nn::Linear<T>(ps, "dec.prenet2", cfg.prenet_dim, cfg.prenet_dim);
    attn_lstm = nn::LstmCell<T>(ps, "dec.attn_lstm", cfg.prenet_dim + M,
                                cfg.attn_lstm_dim);
    query_fc = nn::Linear<T>(ps, "dec.query_fc", cfg.attn_lstm_dim,
                             cfg.attn_query_dim, /*bias=*/false);
    memory_fc = nn::Linear<T>(ps, "dec.memory_fc", M, cfg.attn_memory_dim);
    location_conv = nn::Conv1d<T>(ps, "dec.location_conv", 1,
                                  cfg.attn_location_channels,
                                  cfg.attn_location_kernel, 1,
                                  (cfg.attn_location_kernel - 1) / 2,
                                  /*bias=*/false);
    location_fc = nn::Linear<T>(ps, "dec.location_fc",
                                cfg.attn_location_channels,
                                cfg.attn_location_dim, /*bias=*/false);
    weight_fc = nn::Linear<T>(ps, "dec.weight_fc", cfg.attn_query_dim, 1,
                              /*bias=*/false);
    dec_lstm = nn::LstmCell<T>(ps, "dec.dec_lstm", cfg.attn_lstm_dim + M,
                               cfg.decoder_lstm_dim);
    proj = nn::Linear<T>(ps, "dec.proj", cfg.decoder_lstm_dim + M, cfg.n_mel);
    stop_fc = nn::Linear<T>(ps, "dec.stop", cfg.decoder_lstm_dim + M, 1);
  }

  Var<T> prenet(Fwd<T>& f, Var<T> frame) const {
    // Dropout stays on at inference; the caller provides the stream.
    Var<T> h = f.g.dropout(f.g.relu(prenet1.forward(f, frame)),
                           cfg.prenet_dropout, f.rng);
    return f.g.dropout(f.g.relu(prenet2.forward(f, h)), cfg.prenet_dropout,
                       f.rng);
  }

  // teacher == nullptr: free-running, stop gate + max_frames cap.
  // teacher != nullptr: emits exactly teacher->rows frames; the input frame
  // at step t is the ground-truth previous frame with probability
  // sampling_prob, else the model's own previous output (detached).
  DecodeResult<T> decode(Fwd<T>& f, Var<T> memory, const Tensor<T>* teacher,
                         double sampling_prob, int max_frames) const {
    Graph<T>& g = f.g;
    const int L = g.val(memory).rows;
    const int n_mel = cfg.n_mel;
    Var<T> processed_memory = memory_fc.forward(f, memory);  // [L, A]

    auto attn_state = attn_lstm.initial(g);
    auto dec_state = dec_lstm.initial(g);
    Var<T> context = g.zeros(1, g.val(memory).cols);
    Var<T> cumulative = g.zeros(L, 1);

    std::vector<Var<T>> frames, aligns, stops;
    Tensor<T> prev_value(1, n_mel);  // all-zero go frame
    bool use_teacher_prev = false;
    int t = 0;
    bool truncated = false;
    const int cap = teacher != nullptr ? teacher->rows : max_frames;
    while (t < cap) {
      Tensor<T> input_frame(1, n_mel);
      if (t > 0) {
        if (teacher != nullptr && use_teacher_prev)
          std::copy(teacher->row(t - 1), teacher->row(t - 1) + n_mel,
                    input_frame.row(0));
        else
          input_frame = prev_value;
      }
      Var<T> pre = prenet(f, g.constant(std::move(input_frame)));
      Var<T> x = g.concat_cols({pre, context});
      attn_state = attn_lstm.step(f, x, attn_state);

      Var<T> query = query_fc.forward(f, attn_state.h);              // [1, A]
      Var<T> loc = location_fc.forward(
          f, location_conv.forward(f, cumulative));                  // [L, A]
      Var<T> e = weight_fc.forward(
          f, g.tanh_(g.add(g.add(processed_memory,
                                 g.broadcast_row(query, L)),
                           loc)));                                   // [L, 1]
      Var<T> alpha = g.softmax_rows(g.transpose(e));                 // [1, L]
      cumulative = g.add(cumulative, g.transpose(alpha));
      context = g.matmul(alpha, memory);                             // [1, M]

      dec_state = dec_lstm.step(f, g.concat_cols({attn_state.h, context}),
                                dec_state);
      Var<T> hc = g.concat_cols({dec_state.h, context});
      Var<T> frame = proj.forward(f, hc);
      Var<T> stop = stop_fc.forward(f, hc);

      frames.push_back(frame);
      aligns.push_back(alpha);
      stops.push_back(stop);
      prev_value = g.val(frame);  // detached autoregressive feedback

      ++t;
      if (teacher != nullptr) {
        use_teacher_prev = f.training ? f.rng.bernoulli(sampling_prob) : true;
      } else if (g.val(stop)[0] > T(0)) {  // sigmoid(logit) > 0.5
        break;
      } else if (t >= cap) {
        truncated = true;
      }
    }

    DecodeResult<T> res;
    res.mel_var = g.concat_rows(frames);
    res.stop_var = g.concat_rows(stops);
    Var<T> align_var = g.concat_rows(aligns);
    res.mel = g.val(res.mel_var);
    res.alignments = g.val(align_var);
    res.stop_logits = g.val(res.stop_var);
    res.truncated = truncated;
    return res;
  }
};

}  // namespace trivox::model

#endif  // TRIVOX_MODEL_MODEL_H_
