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

#ifndef TRIVOX_NN_GRAPH_H_
#define TRIVOX_NN_GRAPH_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "core/check.h"
#include "core/kernels.h"
#include "core/rng.h"
#include "core/tensor.h"

namespace trivox::nn {

// Define-by-run reverse-mode tape. Each op appends a node holding the value
// and, while recording, a closure that scatters the node's gradient to its
// inputs. backward() replays the tape in reverse. One graph per forward
// pass; graphs are independent, so batches can build them on worker threads.

template <typename T>
struct Var {
  int idx = -1;
  bool valid() const { return idx >= 0; }
};

template <typename T>
class Graph {
 public:
  explicit Graph(bool recording = true) : recording_(recording) {}
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  bool recording() const { return recording_; }
  int size() const { return int(nodes_.size()); }

  // ---- node access -------------------------------------------------------

  const Tensor<T>& val(Var<T> v) const {
    const Node& n = nodes_[size_t(v.idx)];
    return n.borrowed != nullptr ? *n.borrowed : n.value;
  }

  // Gradient buffer (allocated zeroed on first touch).
  Tensor<T>& grad(Var<T> v) {
    Node& n = nodes_[size_t(v.idx)];
    const Tensor<T>& x = val(v);
    if (n.grad.rows != x.rows || n.grad.cols != x.cols)
      n.grad = Tensor<T>(x.rows, x.cols);
    return n.grad;
  }

  bool has_grad(Var<T> v) const {
    return !nodes_[size_t(v.idx)].grad.empty();
  }

  bool needs_grad(Var<T> v) const { return nodes_[size_t(v.idx)].needs_grad; }

  // ---- leaves ------------------------------------------------------------

  // Borrow a persistent tensor (parameter or input). The pointee must
  // outlive the graph.
  Var<T> leaf(const Tensor<T>* t, bool needs_grad) {
    Node n;
    n.borrowed = t;
    n.needs_grad = needs_grad && recording_;
    return push(std::move(n));
  }

  Var<T> constant(Tensor<T> t) {
    Node n;
    n.value = std::move(t);
    return push(std::move(n));
  }

  Var<T> zeros(int r, int c) { return constant(Tensor<T>(r, c)); }

  // ---- arithmetic --------------------------------------------------------

  Var<T> add(Var<T> a, Var<T> b) {
    const Tensor<T>&A = val(a), &B = val(b);
    TVX_CHECK(A.same_shape(B)) << "add: shape mismatch";
    Tensor<T> out = A;
    for (int64_t i = 0; i < out.size(); ++i) out[i] += B[i];
    return unary_or_binary(std::move(out), a, b, [this, a, b](Var<T> y) {
      const Tensor<T>& dy = grad(y);
      if (needs_grad(a)) acc(a, dy);
      if (needs_grad(b)) acc(b, dy);
    });
  }

  Var<T> sub(Var<T> a, Var<T> b) {
    const Tensor<T>&A = val(a), &B = val(b);
    TVX_CHECK(A.same_shape(B)) << "sub: shape mismatch";
    Tensor<T> out = A;
    for (int64_t i = 0; i < out.size(); ++i) out[i] -= B[i];
    return unary_or_binary(std::move(out), a, b, [this, a, b](Var<T> y) {
      const Tensor<T>& dy = grad(y);
      if (needs_grad(a)) acc(a, dy);
      if (needs_grad(b)) {
        Tensor<T>& db = grad(b);
        for (int64_t i = 0; i < dy.size(); ++i) db[i] -= dy[i];
      }
    });
  }

  Var<T> mul(Var<T> a, Var<T> b) {
    const Tensor<T>&A = val(a), &B = val(b);
    TVX_CHECK(A.same_shape(B)) << "mul: shape mismatch";
    Tensor<T> out = A;
    for (int64_t i = 0; i < out.size(); ++i) out[i] *= B[i];
    return unary_or_binary(std::move(out), a, b, [this, a, b](Var<T> y) {
      const Tensor<T>& dy = grad(y);
      const Tensor<T>&A2 = val(a), &B2 = val(b);
      if (needs_grad(a)) {
        Tensor<T>& da = grad(a);
        for (int64_t i = 0; i < dy.size(); ++i) da[i] += dy[i] * B2[i];
      }
      if (needs_grad(b)) {
        Tensor<T>& db = grad(b);
        for (int64_t i = 0; i < dy.size(); ++i) db[i] += dy[i] * A2[i];
      }
    });
  }

  Var<T> scale(Var<T> a, double c) {
    Tensor<T> out = val(a);
    for (auto& x : out.v) x = T(double(x) * c);
    return unary(std::move(out), a, [this, a, c](Var<T> y) {
      const Tensor<T>& dy = grad(y);
      Tensor<T>& da = grad(a);
      for (int64_t i = 0; i < dy.size(); ++i) da[i] += T(double(dy[i]) * c);
    });
  }

  Var<T> add_const(Var<T> a, double c) {
    Tensor<T> out = val(a);
    for (auto& x : out.v) x = T(double(x) + c);
    return unary(std::move(out), a, [this, a](Var<T> y) { acc(a, grad(y)); });
  }

  // x [m,n] + b (row vector, [1,n] or rank-1 [n])
  Var<T> add_rowvec(Var<T> x, Var<T> b) {
    const Tensor<T>&X = val(x), &B = val(b);
    TVX_CHECK(int(B.size()) == X.cols) << "add_rowvec: width mismatch";
    Tensor<T> out = X;
    for (int r = 0; r < X.rows; ++r) {
      T* o = out.row(r);
      for (int c = 0; c < X.cols; ++c) o[c] += B[c];
    }
    return unary_or_binary(std::move(out), x, b, [this, x, b](Var<T> y) {
      const Tensor<T>& dy = grad(y);
      if (needs_grad(x)) acc(x, dy);
      if (needs_grad(b)) {
        Tensor<T>& db = grad(b);
        for (int r = 0; r < dy.rows; ++r) {
          const T* d = dy.row(r);
          for (int c = 0; c < dy.cols; ++c) db[c] += d[c];
        }
      }
    });
  }

  // x [m,n] * s (per-column gate, [1,n] or rank-1 [n])
  Var<T> mul_rowvec(Var<T> x, Var<T> s) {
    const Tensor<T>&X = val(x), &S = val(s);
    TVX_CHECK(int(S.size()) == X.cols) << "mul_rowvec: width mismatch";
    Tensor<T> out = X;
    for (int r = 0; r < X.rows; ++r) {
      T* o = out.row(r);
      for (int c = 0; c < X.cols; ++c) o[c] *= S[c];
    }
    return unary_or_binary(std::move(out), x, s, [this, x, s](Var<T> y) {
      const Tensor<T>& dy = grad(y);
      const Tensor<T>&X2 = val(x), &S2 = val(s);
      if (needs_grad(x)) {
        Tensor<T>& dx = grad(x);
        for (int r = 0; r < dy.rows; ++r)
          for (int c = 0; c < dy.cols; ++c) dx.at(r, c) += dy.at(r, c) * S2[c];
      }
      if (needs_grad(s)) {
        Tensor<T>& ds = grad(s);
        for (int r = 0; r < dy.rows; ++r)
          for (int c = 0; c < dy.cols; ++c) ds[c] += dy.at(r, c) * X2.at(r, c);
      }
    });
  }

  // Repeat a [1,n] row m times -> [m,n].
  Var<T> broadcast_row(Var<T> x, int m) {
    const Tensor<T>& X = val(x);
    TVX_CHECK(X.rows == 1) << "broadcast_row expects a single row";
    Tensor<T> out(m, X.cols);
    for (int r = 0; r < m; ++r)
      std::copy(X.row(0), X.row(0) + X.cols, out.row(r));
    return unary(std::move(out), x, [this, x](Var<T> y) {
      const Tensor<T>& dy = grad(y);
      Tensor<T>& dx = grad(x);
      for (int r = 0; r < dy.rows; ++r)
        for (int c = 0; c < dy.cols; ++c) dx[c] += dy.at(r, c);
    });
  }

  // ---- matrix products ---------------------------------------------------

  // A [m,k] . B [k,n]
  Var<T> matmul(Var<T> a, Var<T> b) {
    const Tensor<T>&A = val(a), &B = val(b);
    TVX_CHECK(A.cols == B.rows) << "matmul: inner dims " << A.cols << " vs "
                                << B.rows;
    Tensor<T> out(A.rows, B.cols);
    kernels::gemm_nn_acc(A, B, out);
    return unary_or_binary(std::move(out), a, b, [this, a, b](Var<T> y) {
      const Tensor<T>& dy = grad(y);
      const Tensor<T>&A2 = val(a), &B2 = val(b);
      if (needs_grad(a)) kernels::gemm_nt(dy, B2, grad(a), /*acc=*/true);
      if (needs_grad(b)) kernels::gemm_tn_acc(A2, dy, grad(b));
    });
  }

  // A [m,k] . W^T with W [n,k]  (the linear-layer product)
  Var<T> matmul_nt(Var<T> a, Var<T> w) {
    const Tensor<T>&A = val(a), &W = val(w);
    TVX_CHECK(A.cols == W.cols) << "matmul_nt: inner dims " << A.cols << " vs "
                                << W.cols;
    Tensor<T> out(A.rows, W.rows);
    kernels::gemm_nt(A, W, out, /*acc=*/false);
    return unary_or_binary(std::move(out), a, w, [this, a, w](Var<T> y) {
      const Tensor<T>& dy = grad(y);
      const Tensor<T>&A2 = val(a), &W2 = val(w);
      if (needs_grad(a)) kernels::gemm_nn_acc(dy, W2, grad(a));
      if (needs_grad(w)) kernels::gemm_tn_acc(dy, A2, grad(w));
    });
  }

  // ---- activations -------------------------------------------------------

  Var<T> relu(Var<T> a) {
    Tensor<T> out = val(a);
    for (auto& x : out.v) x = x > T(0) ? x : T(0);
    return unary(std::move(out), a, [this, a](Var<T> y) {
      const Tensor<T>&dy = grad(y), &Y = val(y);
      Tensor<T>& da = grad(a);
      for (int64_t i = 0; i < dy.size(); ++i)
        if (Y[i] > T(0)) da[i] += dy[i];
    });
  }

  Var<T> sigmoid(Var<T> a) {
    Tensor<T> out = val(a);
    for (auto& x : out.v) x = T(1) / (T(1) + T(std::exp(-double(x))));
    return unary(std::move(out), a, [this, a](Var<T> y) {
      const Tensor<T>&dy = grad(y), &Y = val(y);
      Tensor<T>& da = grad(a);
      for (int64_t i = 0; i < dy.size(); ++i)
        da[i] += dy[i] * Y[i] * (T(1) - Y[i]);
    });
  }

  Var<T> tanh_(Var<T> a) {
    Tensor<T> out = val(a);
    for (auto& x : out.v) x = T(std::tanh(double(x)));
    return unary(std::move(out), a, [this, a](Var<T> y) {
      const Tensor<T>&dy = grad(y), &Y = val(y);
      Tensor<T>& da = grad(a);
      for (int64_t i = 0; i < dy.size(); ++i)
        da[i] += dy[i] * (T(1) - Y[i] * Y[i]);
    });
  }

  Var<T> sqrt_(Var<T> a) {
    Tensor<T> out = val(a);
    for (auto& x : out.v) {
      TVX_CHECK(x >= T(0)) << "sqrt of negative value";
      x = T(std::sqrt(double(x)));
    }
    return unary(std::move(out), a, [this, a](Var<T> y) {
      const Tensor<T>&dy = grad(y), &Y = val(y);
      Tensor<T>& da = grad(a);
      for (int64_t i = 0; i < dy.size(); ++i)
        da[i] += dy[i] / (T(2) * std::max(Y[i], T(1e-12)));
    });
  }

  // Row-wise softmax (used over attention scores laid out as [1,L]).
  Var<T> softmax_rows(Var<T> a) {
    const Tensor<T>& A = val(a);
    Tensor<T> out = A;
    for (int r = 0; r < A.rows; ++r) {
      T* o = out.row(r);
      T mx = o[0];
      for (int c = 1; c < A.cols; ++c) mx = std::max(mx, o[c]);
      double sum = 0.0;
      for (int c = 0; c < A.cols; ++c) {
        o[c] = T(std::exp(double(o[c] - mx)));
        sum += double(o[c]);
      }
      for (int c = 0; c < A.cols; ++c) o[c] = T(double(o[c]) / sum);
    }
    return unary(std::move(out), a, [this, a](Var<T> y) {
      const Tensor<T>&dy = grad(y), &Y = val(y);
      Tensor<T>& da = grad(a);
      for (int r = 0; r < dy.rows; ++r) {
        double dot = 0.0;
        for (int c = 0; c < dy.cols; ++c)
          dot += double(dy.at(r, c)) * double(Y.at(r, c));
        for (int c = 0; c < dy.cols; ++c)
          da.at(r, c) += Y.at(r, c) * (dy.at(r, c) - T(dot));
      }
    });
  }

  // ---- shape ops ---------------------------------------------------------

  Var<T> transpose(Var<T> a) {
    const Tensor<T>& A = val(a);
    Tensor<T> out(A.cols, A.rows);
    for (int r = 0; r < A.rows; ++r)
      for (int c = 0; c < A.cols; ++c) out.at(c, r) = A.at(r, c);
    return unary(std::move(out), a, [this, a](Var<T> y) {
      const Tensor<T>& dy = grad(y);
      Tensor<T>& da = grad(a);
      for (int r = 0; r < dy.rows; ++r)
        for (int c = 0; c < dy.cols; ++c) da.at(c, r) += dy.at(r, c);
    });
  }

  Var<T> reverse_rows(Var<T> a) {
    const Tensor<T>& A = val(a);
    Tensor<T> out(A.rows, A.cols);
    for (int r = 0; r < A.rows; ++r)
      std::copy(A.row(r), A.row(r) + A.cols, out.row(A.rows - 1 - r));
    return unary(std::move(out), a, [this, a](Var<T> y) {
      const Tensor<T>& dy = grad(y);
      Tensor<T>& da = grad(a);
      for (int r = 0; r < dy.rows; ++r) {
        const T* d = dy.row(r);
        T* o = da.row(dy.rows - 1 - r);
        for (int c = 0; c < dy.cols; ++c) o[c] += d[c];
      }
    });
  }

  Var<T> slice_cols(Var<T> a, int c0, int c1) {
    const Tensor<T>& A = val(a);
    TVX_CHECK(0 <= c0 && c0 < c1 && c1 <= A.cols) << "slice_cols out of range";
    Tensor<T> out(A.rows, c1 - c0);
    for (int r = 0; r < A.rows; ++r)
      std::copy(A.row(r) + c0, A.row(r) + c1, out.row(r));
    return unary(std::move(out), a, [this, a, c0](Var<T> y) {
      const Tensor<T>& dy = grad(y);
      Tensor<T>& da = grad(a);
      for (int r = 0; r < dy.rows; ++r) {
        const T* d = dy.row(r);
        T* o = da.row(r) + c0;
        for (int c = 0; c < dy.cols; ++c) o[c] += d[c];
      }
    });
  }

  Var<T> slice_rows(Var<T> a, int r0, int r1) {
    const Tensor<T>& A = val(a);
    TVX_CHECK(0 <= r0 && r0 < r1 && r1 <= A.rows) << "slice_rows out of range";
    Tensor<T> out(r1 - r0, A.cols);
    for (int r = r0; r < r1; ++r)
      std::copy(A.row(r), A.row(r) + A.cols, out.row(r - r0));
    return unary(std::move(out), a, [this, a, r0](Var<T> y) {
      const Tensor<T>& dy = grad(y);
      Tensor<T>& da = grad(a);
      for (int r = 0; r < dy.rows; ++r) {
        const T* d = dy.row(r);
        T* o = da.row(r + r0);
        for (int c = 0; c < dy.cols; ++c) o[c] += d[c];
      }
    });
  }

  Var<T> concat_cols(const std::vector<Var<T>>& parts) {
    TVX_CHECK(!parts.empty()) << "concat_cols: no inputs";
    const int rows = val(parts[0]).rows;
    int cols = 0;
    for (auto p : parts) {
      TVX_CHECK(val(p).rows == rows) << "concat_cols: row mismatch";
      cols += val(p).cols;
    }
    Tensor<T> out(rows, cols);
    int off = 0;
    for (auto p : parts) {
      const Tensor<T>& P = val(p);
      for (int r = 0; r < rows; ++r)
        std::copy(P.row(r), P.row(r) + P.cols, out.row(r) + off);
      off += P.cols;
    }
    std::vector<Var<T>> ps = parts;
    return nary(std::move(out), ps, [this, ps](Var<T> y) {
      const Tensor<T>& dy = grad(y);
      int o = 0;
      for (auto p : ps) {
        const int pc = val(p).cols;
        if (needs_grad(p)) {
          Tensor<T>& dp = grad(p);
          for (int r = 0; r < dy.rows; ++r) {
            const T* d = dy.row(r) + o;
            T* g = dp.row(r);
            for (int c = 0; c < pc; ++c) g[c] += d[c];
          }
        }
        o += pc;
      }
    });
  }

  Var<T> concat_rows(const std::vector<Var<T>>& parts) {
    TVX_CHECK(!parts.empty()) << "concat_rows: no inputs";
    const int cols = val(parts[0]).cols;
    int rows = 0;
    for (auto p : parts) {
      TVX_CHECK(val(p).cols == cols) << "concat_rows: col mismatch";
      rows += val(p).rows;
    }
    Tensor<T> out(rows, cols);
    int off = 0;
    for (auto p : parts) {
      const Tensor<T>& P = val(p);
      std::copy(P.v.begin(), P.v.end(), out.row(off));
      off += P.rows;
    }
    std::vector<Var<T>> ps = parts;
    return nary(std::move(out), ps, [this, ps](Var<T> y) {
      const Tensor<T>& dy = grad(y);
      int o = 0;
      for (auto p : ps) {
        const int pr = val(p).rows;
        if (needs_grad(p)) {
          Tensor<T>& dp = grad(p);
          for (int r = 0; r < pr; ++r) {
            const T* d = dy.row(o + r);
            T* g = dp.row(r);
            for (int c = 0; c < dy.cols; ++c) g[c] += d[c];
          }
        }
        o += pr;
      }
    });
  }

  // Mean over rows -> [1, C].
  Var<T> mean_rows(Var<T> a) {
    const Tensor<T>& A = val(a);
    TVX_CHECK(A.rows > 0) << "mean_rows on empty tensor";
    Tensor<T> out(1, A.cols);
    for (int r = 0; r < A.rows; ++r)
      for (int c = 0; c < A.cols; ++c) out[c] += A.at(r, c);
    for (int c = 0; c < A.cols; ++c) out[c] /= T(A.rows);
    return unary(std::move(out), a, [this, a](Var<T> y) {
      const Tensor<T>& dy = grad(y);
      Tensor<T>& da = grad(a);
      const T inv = T(1) / T(da.rows);
      for (int r = 0; r < da.rows; ++r)
        for (int c = 0; c < da.cols; ++c) da.at(r, c) += dy[c] * inv;
    });
  }

  // ---- embeddings, dropout -----------------------------------------------

  Var<T> embedding(Var<T> table, const std::vector<int>& ids) {
    const Tensor<T>& Tb = val(table);
    TVX_CHECK(!ids.empty()) << "embedding lookup on empty id sequence";
    for (int id : ids)
      TVX_CHECK(0 <= id && id < Tb.rows)
          << "unit id " << id << " out of vocabulary of size " << Tb.rows;
    Tensor<T> out(int(ids.size()), Tb.cols);
    for (size_t r = 0; r < ids.size(); ++r)
      std::copy(Tb.row(ids[r]), Tb.row(ids[r]) + Tb.cols, out.row(int(r)));
    std::vector<int> ids_copy = ids;
    return unary(std::move(out), table, [this, table, ids_copy](Var<T> y) {
      const Tensor<T>& dy = grad(y);
      Tensor<T>& dt = grad(table);
      for (size_t r = 0; r < ids_copy.size(); ++r) {
        const T* d = dy.row(int(r));
        T* g = dt.row(ids_copy[r]);
        for (int c = 0; c < dy.cols; ++c) g[c] += d[c];
      }
    });
  }

  // Inverted dropout; the mask is drawn from rng (so eval passes stay
  // deterministic when the caller seeds a fixed stream).
  Var<T> dropout(Var<T> a, double p, Rng& rng) {
    if (p <= 0.0) return a;
    TVX_CHECK(p < 1.0) << "dropout rate must be < 1";
    const Tensor<T>& A = val(a);
    Tensor<T> mask(A.rows, A.cols);
    const T keep = T(1.0 / (1.0 - p));
    for (auto& m : mask.v) m = rng.uniform() < p ? T(0) : keep;
    Tensor<T> out = A;
    for (int64_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
    auto mask_ptr = std::make_shared<Tensor<T>>(std::move(mask));
    return unary(std::move(out), a, [this, a, mask_ptr](Var<T> y) {
      const Tensor<T>& dy = grad(y);
      Tensor<T>& da = grad(a);
      for (int64_t i = 0; i < dy.size(); ++i) da[i] += dy[i] * (*mask_ptr)[i];
    });
  }

  // ---- losses ------------------------------------------------------------

  // Sum of squared differences against a constant target; scalar [1,1].
  Var<T> sse(Var<T> pred, const Tensor<T>& target) {
    const Tensor<T>& P = val(pred);
    TVX_CHECK(P.same_shape(target)) << "sse: shape mismatch";
    double s = 0.0;
    for (int64_t i = 0; i < P.size(); ++i) {
      const double d = double(P[i]) - double(target[i]);
      s += d * d;
    }
    Tensor<T> out(1, 1);
    out[0] = T(s);
    auto tgt = std::make_shared<Tensor<T>>(target);
    return unary(std::move(out), pred, [this, pred, tgt](Var<T> y) {
      const T dy = grad(y)[0];
      const Tensor<T>& P2 = val(pred);
      Tensor<T>& dp = grad(pred);
      for (int64_t i = 0; i < P2.size(); ++i)
        dp[i] += dy * T(2) * (P2[i] - (*tgt)[i]);
    });
  }

  // Mean cross entropy of row-wise logits against integer labels.
  Var<T> cross_entropy_logits(Var<T> logits, const std::vector<int>& labels) {
    const Tensor<T>& L = val(logits);
    TVX_CHECK(int(labels.size()) == L.rows) << "cross_entropy: label count";
    double total = 0.0;
    Tensor<T> probs(L.rows, L.cols);
    for (int r = 0; r < L.rows; ++r) {
      TVX_CHECK(0 <= labels[size_t(r)] && labels[size_t(r)] < L.cols)
          << "label out of range";
      const T* x = L.row(r);
      T mx = x[0];
      for (int c = 1; c < L.cols; ++c) mx = std::max(mx, x[c]);
      double sum = 0.0;
      for (int c = 0; c < L.cols; ++c) sum += std::exp(double(x[c] - mx));
      const double lse = std::log(sum) + double(mx);
      total += lse - double(x[labels[size_t(r)]]);
      for (int c = 0; c < L.cols; ++c)
        probs.at(r, c) = T(std::exp(double(x[c]) - lse));
    }
    Tensor<T> out(1, 1);
    out[0] = T(total / L.rows);
    auto probs_ptr = std::make_shared<Tensor<T>>(std::move(probs));
    auto labels_copy = std::make_shared<std::vector<int>>(labels);
    return unary(std::move(out), logits,
                 [this, logits, probs_ptr, labels_copy](Var<T> y) {
                   const T dy = grad(y)[0];
                   Tensor<T>& dl = grad(logits);
                   const int m = dl.rows;
                   for (int r = 0; r < m; ++r)
                     for (int c = 0; c < dl.cols; ++c) {
                       T g = (*probs_ptr).at(r, c);
                       if (c == (*labels_copy)[size_t(r)]) g -= T(1);
                       dl.at(r, c) += dy * g / T(m);
                     }
                 });
  }

  // Mean binary cross entropy on logits against constant 0/1 targets.
  // pos_weight scales the loss of positive targets (rebalances the single
  // end-of-utterance frame against the rest).
  Var<T> bce_logits(Var<T> logits, const Tensor<T>& targets,
                    double pos_weight = 1.0) {
    const Tensor<T>& L = val(logits);
    TVX_CHECK(L.same_shape(targets)) << "bce: shape mismatch";
    double total = 0.0;
    for (int64_t i = 0; i < L.size(); ++i) {
      const double z = double(L[i]), t = double(targets[i]);
      const double w = t > 0.5 ? pos_weight : 1.0;
      total += w * (std::max(z, 0.0) - z * t + std::log1p(std::exp(-std::abs(z))));
    }
    Tensor<T> out(1, 1);
    out[0] = T(total / double(L.size()));
    auto tgt = std::make_shared<Tensor<T>>(targets);
    return unary(std::move(out), logits, [this, logits, tgt, pos_weight](Var<T> y) {
      const T dy = grad(y)[0];
      const Tensor<T>& L2 = val(logits);
      Tensor<T>& dl = grad(logits);
      const T inv = T(1) / T(L2.size());
      for (int64_t i = 0; i < L2.size(); ++i) {
        const T s = T(1) / (T(1) + T(std::exp(-double(L2[i]))));
        const T w = (*tgt)[i] > T(0.5) ? T(pos_weight) : T(1);
        dl[i] += dy * w * (s - (*tgt)[i]) * inv;
      }
    });
  }

  // c0*a + c1*b for scalars/same-shape tensors (loss mixing).
  Var<T> lincomb(double c0, Var<T> a, double c1, Var<T> b) {
    return add(scale(a, c0), scale(b, c1));
  }

  // x [T,Cin] -> patches [T, Cin*K] for a stride-1 dilated convolution.
  Var<T> im2col_op(Var<T> x, int K, int dil, int pad) {
    Tensor<T> out = kernels::im2col(val(x), K, dil, pad);
    return unary(std::move(out), x, [this, x, K, dil, pad](Var<T> y) {
      kernels::col2im_acc(grad(y), grad(x), K, dil, pad);
    });
  }

  // ---- backward ----------------------------------------------------------

  void backward(Var<T> loss) {
    TVX_CHECK(recording_) << "backward on a non-recording graph";
    TVX_CHECK(val(loss).size() == 1) << "backward seed must be scalar";
    grad(loss)[0] = T(1);
    for (int i = loss.idx; i >= 0; --i) {
      Node& n = nodes_[size_t(i)];
      if (!n.backward || n.grad.empty()) continue;
      n.backward(Var<T>{i});
    }
  }

 private:
  struct Node {
    Tensor<T> value;
    const Tensor<T>* borrowed = nullptr;
    Tensor<T> grad;
    bool needs_grad = false;
    std::function<void(Var<T>)> backward;
  };

  Var<T> push(Node n) {
    nodes_.push_back(std::move(n));
    return Var<T>{int(nodes_.size()) - 1};
  }

  void acc(Var<T> v, const Tensor<T>& dy) {
    Tensor<T>& g = grad(v);
    for (int64_t i = 0; i < dy.size(); ++i) g[i] += dy[i];
  }

  template <typename F>
  Var<T> unary(Tensor<T> out, Var<T> a, F&& bw) {
    Node n;
    n.value = std::move(out);
    n.needs_grad = recording_ && needs_grad(a);
    if (n.needs_grad) n.backward = std::forward<F>(bw);
    return push(std::move(n));
  }

  template <typename F>
  Var<T> unary_or_binary(Tensor<T> out, Var<T> a, Var<T> b, F&& bw) {
    Node n;
    n.value = std::move(out);
    n.needs_grad = recording_ && (needs_grad(a) || needs_grad(b));
    if (n.needs_grad) n.backward = std::forward<F>(bw);
    return push(std::move(n));
  }

  template <typename F>
  Var<T> nary(Tensor<T> out, const std::vector<Var<T>>& ps, F&& bw) {
    Node n;
    n.value = std::move(out);
    bool ng = false;
    for (auto p : ps) ng = ng || needs_grad(p);
    n.needs_grad = recording_ && ng;
    if (n.needs_grad) n.backward = std::forward<F>(bw);
    return push(std::move(n));
  }

  bool recording_;
  std::vector<Node> nodes_;
};

// x [T,Cin], w [Cout, Cin*K], optional bias [Cout]; stride 1, zero padding.
template <typename T>
Var<T> conv1d(Graph<T>& g, Var<T> x, Var<T> w, Var<T> b, int K, int dil,
              int pad) {
  const int cin = g.val(x).cols;
  TVX_CHECK(g.val(w).cols == cin * K)
      << "conv1d: weight width " << g.val(w).cols << " != Cin*K = " << cin * K;
  Var<T> y = g.matmul_nt(g.im2col_op(x, K, dil, pad), w);
  if (b.valid()) y = g.add_rowvec(y, b);
  return y;
}

}  // namespace trivox::nn

#endif  // TRIVOX_NN_GRAPH_H_
