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

#include "core/binio.h"
#include "core/kernels.h"
#include "core/rng.h"
#include "core/tensor.h"

using namespace trivox;

namespace {
TensorF random_tensor(int r, int c, uint64_t seed) {
  TensorF t(r, c);
  Rng rng(seed);
  for (auto& x : t.v) x = float(rng.uniform(-1.0, 1.0));
  return t;
}
}  // namespace

TEST_CASE("rng streams are reproducible and serializable") {
  Rng a(123), b(123);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
  const auto state = a.state();
  const double x = a.uniform();
  Rng c(0);
  c.set_state(state);
  CHECK(c.uniform() == x);
  // Uniform stays in range and shows both halves.
  Rng d(7);
  int low = 0;
  for (int i = 0; i < 1000; ++i) {
    const double u = d.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    if (u < 0.5) ++low;
  }
  CHECK(low > 400);
  CHECK(low < 600);
}

TEST_CASE("rng normal has sane moments") {
  Rng rng(99);
  double sum = 0.0, sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double g = rng.normal();
    sum += g;
    sq += g * g;
  }
  CHECK(std::abs(sum / n) < 0.03);
  CHECK(std::abs(sq / n - 1.0) < 0.05);
}

TEST_CASE("serial and parallel kernels agree bit for bit") {
  const TensorF a = random_tensor(7, 33, 1);
  const TensorF b = random_tensor(1408, 33, 2);
  TensorF c_serial(7, 1408), c_par(7, 1408);
  kernels::set_default_mode(kernels::Mode::kSerial);
  kernels::gemm_nt(a, b, c_serial, false);
  kernels::set_default_mode(kernels::Mode::kParallel);
  kernels::gemm_nt(a, b, c_par, false);
  CHECK(c_serial.v == c_par.v);

  const TensorF d = random_tensor(7, 1408, 3);
  const TensorF e = random_tensor(1408, 65, 4);
  TensorF f_serial(7, 65), f_par(7, 65);
  kernels::set_default_mode(kernels::Mode::kSerial);
  kernels::gemm_nn_acc(d, e, f_serial);
  kernels::set_default_mode(kernels::Mode::kParallel);
  kernels::gemm_nn_acc(d, e, f_par);
  CHECK(f_serial.v == f_par.v);

  TensorF g_serial(1408, 33), g_par(1408, 33);
  kernels::set_default_mode(kernels::Mode::kSerial);
  kernels::gemm_tn_acc(d, a, g_serial);
  kernels::set_default_mode(kernels::Mode::kParallel);
  kernels::gemm_tn_acc(d, a, g_par);
  CHECK(g_serial.v == g_par.v);

  const TensorF x = random_tensor(100, 48, 5);
  kernels::set_default_mode(kernels::Mode::kSerial);
  const TensorF p_serial = kernels::im2col(x, 5, 2, 4);
  TensorF dx_serial(100, 48);
  kernels::col2im_acc(p_serial, dx_serial, 5, 2, 4);
  kernels::set_default_mode(kernels::Mode::kParallel);
  const TensorF p_par = kernels::im2col(x, 5, 2, 4);
  TensorF dx_par(100, 48);
  kernels::col2im_acc(p_par, dx_par, 5, 2, 4);
  CHECK(p_serial.v == p_par.v);
  CHECK(dx_serial.v == dx_par.v);
  kernels::set_default_mode(kernels::Mode::kParallel);
}

TEST_CASE("gemm_nt matches a naive triple loop") {
  const TensorF a = random_tensor(5, 17, 10);
  const TensorF b = random_tensor(9, 17, 11);
  TensorF c(5, 9);
  kernels::gemm_nt(a, b, c, false);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 9; ++j) {
      float s = 0.0f;
      for (int l = 0; l < 17; ++l) s += a.at(i, l) * b.at(j, l);
      CHECK(c.at(i, j) == doctest::Approx(s).epsilon(1e-5));
    }
}

TEST_CASE("im2col lays out dilated patches with zero padding") {
  TensorF x(4, 2);
  for (int t = 0; t < 4; ++t)
    for (int c = 0; c < 2; ++c) x.at(t, c) = float(10 * t + c);
  // K=3, dil=1, pad=1: patch row t holds x[t-1], x[t], x[t+1] per channel.
  const TensorF p = kernels::im2col(x, 3, 1, 1);
  CHECK(p.cols == 6);
  CHECK(p.at(0, 0) == 0.0f);        // x[-1] channel 0 -> zero
  CHECK(p.at(0, 1) == 0.0f);        // x[0] ch0 tap1? layout: c*K+kk
  CHECK(p.at(1, 0) == x.at(0, 0));  // t=1, ch0, kk=0 -> x[0]
  CHECK(p.at(1, 1) == x.at(1, 0));
  CHECK(p.at(1, 2) == x.at(2, 0));
  CHECK(p.at(1, 3) == x.at(0, 1));  // ch1 taps
}

TEST_CASE("fnv1a hashing is stable") {
  CHECK(binio::fnv1a_str("") == 0xcbf29ce484222325ULL);
  CHECK(binio::fnv1a_str("a") == binio::fnv1a_str("a"));
  CHECK(binio::fnv1a_str("a") != binio::fnv1a_str("b"));
}

TEST_CASE("thread-local kernel mode override") {
  kernels::set_default_mode(kernels::Mode::kParallel);
  CHECK(kernels::mode() == kernels::Mode::kParallel);
  kernels::set_thread_mode(kernels::Mode::kSerial);
  CHECK(kernels::mode() == kernels::Mode::kSerial);
  kernels::clear_thread_mode();
  CHECK(kernels::mode() == kernels::Mode::kParallel);
}
