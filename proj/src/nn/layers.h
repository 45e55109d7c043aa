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

#ifndef TRIVOX_NN_LAYERS_H_
#define TRIVOX_NN_LAYERS_H_

#include <string>
#include <utility>
#include <vector>

#include "nn/graph.h"
#include "nn/params.h"

namespace trivox::nn {

template <typename T>
struct Linear {
  Param<T>* w = nullptr;
  Param<T>* b = nullptr;  // optional

  Linear() = default;
  Linear(ParamStore<T>& ps, const std::string& name, int in, int out,
         bool bias = true) {
    w = ps.weight(name + ".w", out, in, in);
    if (bias) b = ps.zeros(name + ".b", out);
  }

  Var<T> forward(Fwd<T>& f, Var<T> x) const {
    Var<T> y = f.g.matmul_nt(x, f.bind(w));
    if (b != nullptr) y = f.g.add_rowvec(y, f.bind(b));
    return y;
  }
};

template <typename T>
struct Conv1d {
  Param<T>* w = nullptr;  // [out, in*K]
  Param<T>* b = nullptr;
  int kernel = 1, dilation = 1, pad = 0;

  Conv1d() = default;
  Conv1d(ParamStore<T>& ps, const std::string& name, int in, int out, int K,
         int dil, int pad_, bool bias = true)
      : kernel(K), dilation(dil), pad(pad_) {
    w = ps.weight(name + ".w", out, in * K, in * K);
    if (bias) b = ps.zeros(name + ".b", out);
  }

  Var<T> forward(Fwd<T>& f, Var<T> x) const {
    return conv1d(f.g, x, f.bind(w), b ? f.bind(b) : Var<T>{}, kernel, dilation,
                  pad);
  }
};

// Single LSTM cell; gate layout [i f g o]. Forget-gate bias starts at 1.
template <typename T>
struct LstmCell {
  Param<T>* wx = nullptr;  // [4H, in]
  Param<T>* wh = nullptr;  // [4H, H]
  Param<T>* b = nullptr;   // [4H]
  int hidden = 0;

  LstmCell() = default;
  LstmCell(ParamStore<T>& ps, const std::string& name, int in, int h)
      : hidden(h) {
    wx = ps.weight(name + ".wx", 4 * h, in, in);
    wh = ps.weight(name + ".wh", 4 * h, h, h);
    b = ps.zeros(name + ".b", 4 * h);
    for (int i = h; i < 2 * h; ++i) b->value[i] = T(1);
  }

  struct State {
    Var<T> h, c;
  };

  State initial(Graph<T>& g) const { return {g.zeros(1, hidden), g.zeros(1, hidden)}; }

  State step(Fwd<T>& f, Var<T> x, const State& s) const {
    Graph<T>& g = f.g;
    Var<T> gates = g.add_rowvec(
        g.add(g.matmul_nt(x, f.bind(wx)), g.matmul_nt(s.h, f.bind(wh))),
        f.bind(b));
    const int H = hidden;
    Var<T> i = g.sigmoid(g.slice_cols(gates, 0, H));
    Var<T> fg = g.sigmoid(g.slice_cols(gates, H, 2 * H));
    Var<T> cand = g.tanh_(g.slice_cols(gates, 2 * H, 3 * H));
    Var<T> o = g.sigmoid(g.slice_cols(gates, 3 * H, 4 * H));
    Var<T> c = g.add(g.mul(fg, s.c), g.mul(i, cand));
    Var<T> h = g.mul(o, g.tanh_(c));
    return {h, c};
  }

  // Runs over the rows of x [L, in] -> [L, H].
  Var<T> sequence(Fwd<T>& f, Var<T> x) const {
    const int L = f.g.val(x).rows;
    State s = initial(f.g);
    std::vector<Var<T>> hs;
    hs.reserve(size_t(L));
    for (int t = 0; t < L; ++t) {
      s = step(f, f.g.slice_rows(x, t, t + 1), s);
      hs.push_back(s.h);
    }
    return f.g.concat_rows(hs);
  }
};

template <typename T>
struct BiLstm {
  LstmCell<T> fwd_cell, bwd_cell;

  BiLstm() = default;
  BiLstm(ParamStore<T>& ps, const std::string& name, int in, int h)
      : fwd_cell(ps, name + ".fwd", in, h), bwd_cell(ps, name + ".bwd", in, h) {}

  // [L, in] -> [L, 2H]
  Var<T> forward(Fwd<T>& f, Var<T> x) const {
    Var<T> fw = fwd_cell.sequence(f, x);
    Var<T> bw = f.g.reverse_rows(bwd_cell.sequence(f, f.g.reverse_rows(x)));
    return f.g.concat_cols({fw, bw});
  }
};

// Squeeze-excitation over time: per-channel gates from the time mean.
template <typename T>
struct SeBlock {
  Linear<T> fc1, fc2;

  SeBlock() = default;
  SeBlock(ParamStore<T>& ps, const std::string& name, int channels,
          int bottleneck)
      : fc1(ps, name + ".fc1", channels, bottleneck),
        fc2(ps, name + ".fc2", bottleneck, channels) {}

  Var<T> forward(Fwd<T>& f, Var<T> x) const {
    Var<T> z = f.g.mean_rows(x);
    Var<T> s = f.g.sigmoid(fc2.forward(f, f.g.relu(fc1.forward(f, z))));
    return f.g.mul_rowvec(x, s);
  }
};

// SE-Res2Block: 1x1 conv, grouped dilated convs in a hierarchy, 1x1 conv,
// SE gate, residual.
template <typename T>
struct SeRes2Block {
  Conv1d<T> conv_in, conv_out;
  std::vector<Conv1d<T>> group_convs;  // scale-1 convs over channel groups
  SeBlock<T> se;
  int channels = 0, scale = 1;

  SeRes2Block() = default;
  SeRes2Block(ParamStore<T>& ps, const std::string& name, int channels_,
              int kernel, int dilation, int scale_, int se_bottleneck)
      : channels(channels_), scale(scale_) {
    TVX_CHECK(channels % scale == 0) << "res2 scale must divide channels";
    const int gw = channels / scale;
    conv_in = Conv1d<T>(ps, name + ".in", channels, channels, 1, 1, 0);
    for (int s = 1; s < scale; ++s)
      group_convs.emplace_back(ps, name + ".g" + std::to_string(s), gw, gw,
                               kernel, dilation, dilation * (kernel - 1) / 2);
    conv_out = Conv1d<T>(ps, name + ".out", channels, channels, 1, 1, 0);
    se = SeBlock<T>(ps, name + ".se", channels, se_bottleneck);
  }

  Var<T> forward(Fwd<T>& f, Var<T> x) const {
    Graph<T>& g = f.g;
    Var<T> h = g.relu(conv_in.forward(f, x));
    const int gw = channels / scale;
    std::vector<Var<T>> outs;
    outs.reserve(size_t(scale));
    for (int s = 0; s < scale; ++s) {
      Var<T> xi = g.slice_cols(h, s * gw, (s + 1) * gw);
      if (s == 0) {
        outs.push_back(xi);  // passthrough group
      } else {
        Var<T> in = (s == 1) ? xi : g.add(xi, outs.back());
        outs.push_back(g.relu(group_convs[size_t(s - 1)].forward(f, in)));
      }
    }
    Var<T> merged = g.concat_cols(outs);
    Var<T> out = g.relu(conv_out.forward(f, merged));
    out = se.forward(f, out);
    return g.add(x, out);
  }
};

// Attention-weighted mean and standard deviation over time, concatenated.
template <typename T>
struct AttentiveStatsPooling {
  Linear<T> fc1, fc2;

  AttentiveStatsPooling() = default;
  AttentiveStatsPooling(ParamStore<T>& ps, const std::string& name,
                        int channels, int bottleneck)
      : fc1(ps, name + ".fc1", channels, bottleneck),
        fc2(ps, name + ".fc2", bottleneck, 1) {}

  // [L, C] -> [1, 2C]
  Var<T> forward(Fwd<T>& f, Var<T> x) const {
    Graph<T>& g = f.g;
    Var<T> scores = fc2.forward(f, g.tanh_(fc1.forward(f, x)));  // [L,1]
    Var<T> alpha = g.softmax_rows(g.transpose(scores));          // [1,L]
    Var<T> mean = g.matmul(alpha, x);                            // [1,C]
    Var<T> mean_sq = g.matmul(alpha, g.mul(x, x));
    Var<T> var = g.sub(mean_sq, g.mul(mean, mean));
    Var<T> stddev = g.sqrt_(g.relu(g.add_const(var, 1e-9)));
    return g.concat_cols({mean, stddev});
  }
};

}  // namespace trivox::nn

#endif  // TRIVOX_NN_LAYERS_H_
