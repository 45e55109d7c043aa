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

#ifndef TRIVOX_CORE_KERNELS_H_
#define TRIVOX_CORE_KERNELS_H_

#include <algorithm>
#include <cstddef>
#include <cstdint>

#include "core/tensor.h"

// Dense kernels behind the autograd ops and k-means. Each kernel has one
// inner span routine; the serial entry point runs it over the whole index
// range and the OpenMP entry point runs it over static sub-ranges. Every
// output element is produced by exactly one span call with a fixed
// accumulation order, so serial and parallel results are bit-identical and
// independent of the thread count.

namespace trivox::kernels {

enum class Mode { kSerial, kParallel };

// Process-wide default, overridable per thread (the trainer switches worker
// threads to serial while it parallelizes across batch samples).
Mode default_mode();
void set_default_mode(Mode m);
Mode mode();  // thread override if set, else default
void set_thread_mode(Mode m);
void clear_thread_mode();

// Reads TRIVOX_KERNELS=serial|parallel once at startup.
void init_mode_from_env();

namespace detail {

// C[i, j0:j1) (+)= A[i, :] . B[j, :]  for one row i of A and rows of B.
template <typename T>
inline void gemm_nt_span(const T* A, const T* B, T* C, int k, int n, int i,
                         int j0, int j1, bool acc) {
  const T* a = A + size_t(i) * k;
  T* c = C + size_t(i) * n;
  for (int j = j0; j < j1; ++j) {
    const T* b = B + size_t(j) * k;
    T s = T(0);
#pragma omp simd reduction(+ : s)
    for (int l = 0; l < k; ++l) s += a[l] * b[l];
    c[j] = acc ? c[j] + s : s;
  }
}

// C[i, c0:c1) += sum_j A[i, j] * B[j, c0:c1)
template <typename T>
inline void gemm_nn_acc_span(const T* A, const T* B, T* C, int n, int k, int i,
                             int c0, int c1) {
  const T* a = A + size_t(i) * n;
  T* c = C + size_t(i) * k;
  for (int j = 0; j < n; ++j) {
    const T aij = a[j];
    if (aij == T(0)) continue;
    const T* b = B + size_t(j) * k;
#pragma omp simd
    for (int l = c0; l < c1; ++l) c[l] += aij * b[l];
  }
}

// C[j, :] += sum_i A[i, j] * X[i, :]   (one output row j)
template <typename T>
inline void gemm_tn_acc_span(const T* A, const T* X, T* C, int m, int n, int k,
                             int j) {
  T* c = C + size_t(j) * k;
  for (int i = 0; i < m; ++i) {
    const T aij = A[size_t(i) * n + j];
    if (aij == T(0)) continue;
    const T* x = X + size_t(i) * k;
#pragma omp simd
    for (int l = 0; l < k; ++l) c[l] += aij * x[l];
  }
}

// patches[t, c*K+kk] = x[t - pad + kk*dil, c]  (zero outside), one t.
template <typename T>
inline void im2col_span(const T* x, T* patches, int T_len, int C, int K,
                        int dil, int pad, int t) {
  T* p = patches + size_t(t) * C * K;
  for (int kk = 0; kk < K; ++kk) {
    const int src = t - pad + kk * dil;
    if (src < 0 || src >= T_len) {
      for (int c = 0; c < C; ++c) p[size_t(c) * K + kk] = T(0);
    } else {
      const T* xr = x + size_t(src) * C;
      for (int c = 0; c < C; ++c) p[size_t(c) * K + kk] = xr[c];
    }
  }
}

// dx[p, c] += sum over (t, kk) with t - pad + kk*dil == p, one output row p.
template <typename T>
inline void col2im_span(const T* dpatches, T* dx, int T_len, int C, int K,
                        int dil, int pad, int p) {
  T* out = dx + size_t(p) * C;
  for (int kk = 0; kk < K; ++kk) {
    const int t = p + pad - kk * dil;
    if (t < 0 || t >= T_len) continue;
    const T* dp = dpatches + size_t(t) * C * K;
#pragma omp simd
    for (int c = 0; c < C; ++c) out[c] += dp[size_t(c) * K + kk];
  }
}

}  // namespace detail

// C[m x n] (+)= A[m x k] . B^T, with B given as [n x k].
template <typename T>
void gemm_nt(const Tensor<T>& A, const Tensor<T>& B, Tensor<T>& C, bool acc);

// C[m x k] += A[m x n] . B[n x k]
template <typename T>
void gemm_nn_acc(const Tensor<T>& A, const Tensor<T>& B, Tensor<T>& C);

// C[n x k] += A^T[n x m] . X[m x k], with A given as [m x n].
template <typename T>
void gemm_tn_acc(const Tensor<T>& A, const Tensor<T>& X, Tensor<T>& C);

// x [T x C] -> patches [T x C*K] for a stride-1 dilated 1-D convolution.
template <typename T>
Tensor<T> im2col(const Tensor<T>& x, int K, int dil, int pad);

// Adjoint of im2col: scatters dpatches [T x C*K] back to dx [T x C].
template <typename T>
void col2im_acc(const Tensor<T>& dpatches, Tensor<T>& dx, int K, int dil,
                int pad);

}  // namespace trivox::kernels

#endif  // TRIVOX_CORE_KERNELS_H_
