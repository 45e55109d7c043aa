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

#include "dsp/griffin_lim.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "core/check.h"
#include "core/rng.h"

namespace trivox::dsp {

namespace {

// Solves (A + lambda I) x = b for symmetric positive definite A, in place.
// A is tiny (n_mel x n_mel), plain Cholesky is plenty.
std::vector<double> solve_spd(TensorD a, std::vector<double> b) {
  const int n = a.rows;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = a.at(i, j);
      for (int k = 0; k < j; ++k) s -= a.at(i, k) * a.at(j, k);
      if (i == j) {
        TVX_CHECK(s > 0.0) << "filterbank gram matrix not positive definite";
        a.at(i, i) = std::sqrt(s);
      } else {
        a.at(i, j) = s / a.at(j, j);
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    double s = b[size_t(i)];
    for (int k = 0; k < i; ++k) s -= a.at(i, k) * b[size_t(k)];
    b[size_t(i)] = s / a.at(i, i);
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = b[size_t(i)];
    for (int k = i + 1; k < n; ++k) s -= a.at(k, i) * b[size_t(k)];
    b[size_t(i)] = s / a.at(i, i);
  }
  return b;
}

}  // namespace

Waveform invert_mel(const MelSpectrogram& m, int n_iters, const DspConfig& cfg) {
  TVX_CHECK(m.n_frames() > 0 && m.n_channels() == cfg.n_mel)
      << "invert_mel: bad mel spectrogram";
  TVX_CHECK(n_iters >= 0) << "negative iteration count";
  const Stft stft(cfg);
  const int n_bins = stft.n_bins();
  const int n_frames = m.n_frames();
  const TensorD fb = mel_filterbank(cfg);

  // Least-squares mel -> magnitude: per frame solve (F F^T + eps) y = mel,
  // magnitude = F^T y, clamped to be non-negative.
  TensorD gram(cfg.n_mel, cfg.n_mel);
  for (int i = 0; i < cfg.n_mel; ++i)
    for (int j = 0; j <= i; ++j) {
      double s = 0.0;
      for (int k = 0; k < n_bins; ++k) s += fb.at(i, k) * fb.at(j, k);
      gram.at(i, j) = gram.at(j, i) = s;
    }
  for (int i = 0; i < cfg.n_mel; ++i) gram.at(i, i) += 1e-8;

  TensorD mag(n_frames, n_bins);
  std::vector<double> melrow(static_cast<size_t>(cfg.n_mel));
  for (int t = 0; t < n_frames; ++t) {
    for (int c = 0; c < cfg.n_mel; ++c)
      melrow[size_t(c)] = std::exp(double(m.frames.at(t, c)));
    const auto y = solve_spd(gram, melrow);
    for (int k = 0; k < n_bins; ++k) {
      double s = 0.0;
      for (int c = 0; c < cfg.n_mel; ++c) s += fb.at(c, k) * y[size_t(c)];
      mag.at(t, k) = std::max(s, 0.0);
    }
  }

  // Griffin-Lim with momentum, seeded random initial phases.
  Rng rng(0x9e1f);
  using Spec = std::vector<std::vector<std::complex<double>>>;
  Spec phase(static_cast<size_t>(n_frames)), estimate, prev;
  for (int t = 0; t < n_frames; ++t) {
    phase[size_t(t)].resize(size_t(n_bins));
    for (int k = 0; k < n_bins; ++k) {
      const double a = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
      phase[size_t(t)][size_t(k)] = {std::cos(a), std::sin(a)};
    }
  }
  const double momentum = 0.9;
  Spec spec(static_cast<size_t>(n_frames));
  for (auto& row : spec) row.resize(size_t(n_bins));
  for (int it = 0; it < n_iters; ++it) {
    for (int t = 0; t < n_frames; ++t)
      for (int k = 0; k < n_bins; ++k)
        spec[size_t(t)][size_t(k)] = mag.at(t, k) * phase[size_t(t)][size_t(k)];
    const auto wav = stft.inverse(spec);
    Spec next = stft.forward(wav);
    for (int t = 0; t < n_frames; ++t)
      for (int k = 0; k < n_bins; ++k) {
        std::complex<double> v = next[size_t(t)][size_t(k)];
        if (!prev.empty())
          v -= (momentum / (1.0 + momentum)) * prev[size_t(t)][size_t(k)];
        const double a = std::abs(v);
        phase[size_t(t)][size_t(k)] = a > 1e-12 ? v / a : std::complex<double>(1.0, 0.0);
      }
    prev = std::move(next);
  }
  for (int t = 0; t < n_frames; ++t)
    for (int k = 0; k < n_bins; ++k)
      spec[size_t(t)][size_t(k)] = mag.at(t, k) * phase[size_t(t)][size_t(k)];

  Waveform out;
  out.sample_rate = cfg.sample_rate;
  out.utt_id = "";
  out.samples = stft.inverse(spec);
  float peak = 0.0f;
  for (float s : out.samples) peak = std::max(peak, std::abs(s));
  if (peak > 0.95f)
    for (float& s : out.samples) s *= 0.95f / peak;
  return out;
}

}  // namespace trivox::dsp
