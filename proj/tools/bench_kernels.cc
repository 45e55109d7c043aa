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

// Times the serial reference kernels against the OpenMP variants at the
// shapes the decoder and encoders actually hit. The two variants share one
// inner routine, so their outputs are bit-identical; this target only
// reports throughput.

#include <benchmark/benchmark.h>

#include "core/kernels.h"
#include "core/rng.h"

namespace {

using trivox::Rng;
using trivox::TensorF;
namespace kernels = trivox::kernels;

TensorF random_tensor(int r, int c, uint64_t seed) {
  TensorF t(r, c);
  Rng rng(seed);
  for (auto& x : t.v) x = float(rng.uniform(-1.0, 1.0));
  return t;
}

void bench_gemm_nt(benchmark::State& state, kernels::Mode mode) {
  kernels::set_default_mode(mode);
  const int m = int(state.range(0)), k = int(state.range(1)), n = int(state.range(2));
  const TensorF a = random_tensor(m, k, 1);
  const TensorF b = random_tensor(n, k, 2);
  TensorF c(m, n);
  for (auto _ : state) {
    kernels::gemm_nt(a, b, c, false);
    benchmark::DoNotOptimize(c.data());
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(int64_t(state.iterations()) * m * n * k);
}

void bench_conv_im2col(benchmark::State& state, kernels::Mode mode) {
  kernels::set_default_mode(mode);
  const int T = int(state.range(0)), C = int(state.range(1)), K = 5;
  const TensorF x = random_tensor(T, C, 3);
  const TensorF w = random_tensor(C, C * K, 4);
  TensorF y(T, C);
  for (auto _ : state) {
    const TensorF patches = kernels::im2col(x, K, 1, 2);
    kernels::gemm_nt(patches, w, y, false);
    benchmark::DoNotOptimize(y.data());
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(int64_t(state.iterations()) * T * C * C * K);
}

}  // namespace

// Decoder LSTM gate products (batch-row x weight) and encoder convolutions.
BENCHMARK_CAPTURE(bench_gemm_nt, serial, kernels::Mode::kSerial)
    ->Args({1, 704, 1408})->Args({4, 704, 1408})->Args({32, 512, 512});
BENCHMARK_CAPTURE(bench_gemm_nt, parallel, kernels::Mode::kParallel)
    ->Args({1, 704, 1408})->Args({4, 704, 1408})->Args({32, 512, 512});
BENCHMARK_CAPTURE(bench_conv_im2col, serial, kernels::Mode::kSerial)
    ->Args({60, 256})->Args({120, 256});
BENCHMARK_CAPTURE(bench_conv_im2col, parallel, kernels::Mode::kParallel)
    ->Args({60, 256})->Args({120, 256});

BENCHMARK_MAIN();
