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

#ifndef TRIVOX_DSP_AUGMENT_H_
#define TRIVOX_DSP_AUGMENT_H_

#include <cstdint>
#include <vector>

#include "dsp/mel.h"
#include "dsp/signal.h"

namespace trivox::dsp {

struct AugmentSpec {
  std::vector<double> speed_factors{0.9, 1.0, 1.1};
  int n_freq_masks = 2;
  int max_mask_width = 50;  // mel channels, capped at n_mel
  uint64_t rng_seed = 0;
};

// Bandlimited sinc resampling; tempo and pitch both shift. factor 1.0 is a
// bit-exact identity. Output length = round(len / factor).
Waveform speed_perturb(const Waveform& w, double factor);

// Frequency masking: up to n_freq_masks contiguous channel bands set to the
// log floor, widths uniform in [0, max_mask_width]. Unmasked cells are
// untouched; deterministic given rng_seed.
MelSpectrogram spec_augment(const MelSpectrogram& m, const AugmentSpec& spec);

}  // namespace trivox::dsp

#endif  // TRIVOX_DSP_AUGMENT_H_
