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

#include "dsp/augment.h"

#include <algorithm>
#include <cmath>

#include "core/check.h"
#include "core/rng.h"

namespace trivox::dsp {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr int kSincHalfWidth = 16;  // taps per side at unit cutoff

double windowed_sinc(double t, double cutoff, double half_width) {
  if (std::abs(t) >= half_width) return 0.0;
  const double x = kPi * cutoff * t;
  const double s = (std::abs(x) < 1e-12) ? 1.0 : std::sin(x) / x;
  // Hann window over the truncated support.
  const double win = 0.5 + 0.5 * std::cos(kPi * t / half_width);
  return cutoff * s * win;
}
}  // namespace

Waveform speed_perturb(const Waveform& w, double factor) {
  validate(w);
  TVX_CHECK(factor > 0.0) << "speed factor must be positive, got " << factor;
  if (factor == 1.0) return w;

  const int64_t n_in = int64_t(w.samples.size());
  const int64_t n_out = std::llround(double(n_in) / factor);
  // Downsampling (factor > 1) narrows the passband to avoid aliasing.
  const double cutoff = std::min(1.0, 1.0 / factor);
  const double half_width = kSincHalfWidth / cutoff;

  Waveform out;
  out.sample_rate = w.sample_rate;
  out.utt_id = w.utt_id;
  out.samples.resize(size_t(n_out));
  for (int64_t n = 0; n < n_out; ++n) {
    const double pos = double(n) * factor;
    const auto k0 = int64_t(std::ceil(pos - half_width));
    const auto k1 = int64_t(std::floor(pos + half_width));
    double acc = 0.0;
    for (int64_t k = std::max<int64_t>(k0, 0); k <= std::min(k1, n_in - 1); ++k)
      acc += double(w.samples[size_t(k)]) * windowed_sinc(pos - double(k), cutoff, half_width);
    out.samples[size_t(n)] = float(std::clamp(acc, -1.0, 1.0));
  }
  return out;
}

MelSpectrogram spec_augment(const MelSpectrogram& m, const AugmentSpec& spec) {
  TVX_CHECK(spec.n_freq_masks >= 0 && spec.max_mask_width >= 0)
      << "bad SpecAugment parameters";
  MelSpectrogram out = m;
  Rng rng(spec.rng_seed);
  const int n_ch = m.n_channels();
  const int max_w = std::min(spec.max_mask_width, n_ch);
  for (int i = 0; i < spec.n_freq_masks; ++i) {
    const int width = int(rng.uniform_int(uint64_t(max_w) + 1));
    if (width == 0) continue;
    const int start = int(rng.uniform_int(uint64_t(n_ch - width) + 1));
    for (int t = 0; t < out.n_frames(); ++t)
      for (int c = start; c < start + width; ++c)
        out.frames.at(t, c) = m.log_floor;
  }
  return out;
}

}  // namespace trivox::dsp
