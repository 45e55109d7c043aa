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

#ifndef TRIVOX_DSP_SIGNAL_H_
#define TRIVOX_DSP_SIGNAL_H_

#include <string>
#include <vector>

#include "core/tensor.h"

namespace trivox::dsp {

// Mono audio, amplitudes in [-1, 1].
struct Waveform {
  std::vector<float> samples;
  int sample_rate = 0;
  std::string utt_id;

  double duration_s() const {
    return sample_rate > 0 ? double(samples.size()) / sample_rate : 0.0;
  }
};

// Throws on empty input, non-positive rate or non-finite samples.
void validate(const Waveform& w);

// 16-bit PCM mono WAV. Other encodings and channel counts are rejected;
// sample rates are never silently resampled.
Waveform read_wav(const std::string& path, const std::string& utt_id = "");
void write_wav(const std::string& path, const Waveform& w);

}  // namespace trivox::dsp

#endif  // TRIVOX_DSP_SIGNAL_H_
