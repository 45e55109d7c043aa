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

#include "core/kernels.h"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace trivox::kernels {

namespace {
std::atomic<Mode> g_default{Mode::kParallel};
thread_local bool t_has_override = false;
thread_local Mode t_override = Mode::kSerial;
constexpr int kColBlock = 256;
}  // namespace

Mode default_mode() { return g_default.load(std::memory_order_relaxed); }
void set_default_mode(Mode m) { g_default.store(m, std::memory_order_relaxed); }
Mode mode() { return t_has_override ? t_override : default_mode(); }
void set_thread_mode(Mode m) {
  t_has_override = true;
  t_override = m;
}
void clear_thread_mode() { t_has_override = false; }

void init_mode_from_env() {
  const char* e = std::getenv("TRIVOX_KERNELS");
  if (e == nullptr) return;
  if (std::strcmp(e, "serial") == 0) set_default_mode(Mode::kSerial);
  if (std::strcmp(e, "parallel") == 0) set_default_mode(Mode::kParallel);
}

template <typename T>
void gemm_nt(const Tensor<T>& A, const Tensor<T>& B, Tensor<T>& C, bool acc) {
  const int m = A.rows, k = A.cols, n = B.rows;
  TVX_CHECK(B.cols == k) << "gemm_nt: inner dim " << B.cols << " vs " << k;
  TVX_CHECK(C.rows == m && C.cols == n) << "gemm_nt: bad output shape";
  if (mode() == Mode::kSerial) {
    for (int i = 0; i < m; ++i)
      detail::gemm_nt_span(A.data(), B.data(), C.data(), k, n, i, 0, n, acc);
    return;
  }
  const int nb = (n + kColBlock - 1) / kColBlock;
#pragma omp parallel for collapse(2) schedule(static)
  for (int i = 0; i < m; ++i)
    for (int b = 0; b < nb; ++b)
      detail::gemm_nt_span(A.data(), B.data(), C.data(), k, n, i, b * kColBlock,
                           std::min(n, (b + 1) * kColBlock), acc);
}

template <typename T>
void gemm_nn_acc(const Tensor<T>& A, const Tensor<T>& B, Tensor<T>& C) {
  const int m = A.rows, n = A.cols, k = B.cols;
  TVX_CHECK(B.rows == n) << "gemm_nn_acc: inner dim " << B.rows << " vs " << n;
  TVX_CHECK(C.rows == m && C.cols == k) << "gemm_nn_acc: bad output shape";
  if (mode() == Mode::kSerial || m * int64_t(k) < 2 * kColBlock) {
    for (int i = 0; i < m; ++i)
      detail::gemm_nn_acc_span(A.data(), B.data(), C.data(), n, k, i, 0, k);
    return;
  }
  const int nb = (k + kColBlock - 1) / kColBlock;
#pragma omp parallel for collapse(2) schedule(static)
  for (int i = 0; i < m; ++i)
    for (int b = 0; b < nb; ++b)
      detail::gemm_nn_acc_span(A.data(), B.data(), C.data(), n, k, i,
                               b * kColBlock, std::min(k, (b + 1) * kColBlock));
}

template <typename T>
void gemm_tn_acc(const Tensor<T>& A, const Tensor<T>& X, Tensor<T>& C) {
  const int m = A.rows, n = A.cols, k = X.cols;
  TVX_CHECK(X.rows == m) << "gemm_tn_acc: row dim " << X.rows << " vs " << m;
  TVX_CHECK(C.rows == n && C.cols == k) << "gemm_tn_acc: bad output shape";
  if (mode() == Mode::kSerial) {
    for (int j = 0; j < n; ++j)
      detail::gemm_tn_acc_span(A.data(), X.data(), C.data(), m, n, k, j);
    return;
  }
#pragma omp parallel for schedule(static)
  for (int j = 0; j < n; ++j)
    detail::gemm_tn_acc_span(A.data(), X.data(), C.data(), m, n, k, j);
}

template <typename T>
Tensor<T> im2col(const Tensor<T>& x, int K, int dil, int pad) {
  const int T_len = x.rows, C = x.cols;
  Tensor<T> patches(T_len, C * K);
  if (mode() == Mode::kSerial || T_len < 8) {
    for (int t = 0; t < T_len; ++t)
      detail::im2col_span(x.data(), patches.data(), T_len, C, K, dil, pad, t);
    return patches;
  }
#pragma omp parallel for schedule(static)
  for (int t = 0; t < T_len; ++t)
    detail::im2col_span(x.data(), patches.data(), T_len, C, K, dil, pad, t);
  return patches;
}

template <typename T>
void col2im_acc(const Tensor<T>& dpatches, Tensor<T>& dx, int K, int dil,
                int pad) {
  const int T_len = dx.rows, C = dx.cols;
  TVX_CHECK(dpatches.rows == T_len && dpatches.cols == C * K)
      << "col2im_acc: patch shape mismatch";
  if (mode() == Mode::kSerial || T_len < 8) {
    for (int p = 0; p < T_len; ++p)
      detail::col2im_span(dpatches.data(), dx.data(), T_len, C, K, dil, pad, p);
    return;
  }
#pragma omp parallel for schedule(static)
  for (int p = 0; p < T_len; ++p)
    detail::col2im_span(dpatches.data(), dx.data(), T_len, C, K, dil, pad, p);
}

template void gemm_nt<float>(const TensorF&, const TensorF&, TensorF&, bool);
template void gemm_nt<double>(const TensorD&, const TensorD&, TensorD&, bool);
template void gemm_nn_acc<float>(const TensorF&, const TensorF&, TensorF&);
template void gemm_nn_acc<double>(const TensorD&, const TensorD&, TensorD&);
template void gemm_tn_acc<float>(const TensorF&, const TensorF&, TensorF&);
template void gemm_tn_acc<double>(const TensorD&, const TensorD&, TensorD&);
template TensorF im2col<float>(const TensorF&, int, int, int);
template TensorD im2col<double>(const TensorD&, int, int, int);
template void col2im_acc<float>(const TensorF&, TensorF&, int, int, int);
template void col2im_acc<double>(const TensorD&, TensorD&, int, int, int);

}  // namespace trivox::kernels
