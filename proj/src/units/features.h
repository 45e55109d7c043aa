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

#ifndef TRIVOX_UNITS_FEATURES_H_
#define TRIVOX_UNITS_FEATURES_H_

#include <string>

#include "core/tensor.h"
#include "dsp/mel.h"
#include "dsp/signal.h"

namespace trivox::units {

enum class FeatureSource { kExternalSsl, kMfccFallback };

// Per-frame continuous vectors feeding the quantizer. Either loaded from
// externally extracted SSL feature files or computed as an MFCC fallback.
struct FrameFeatures {
  TensorF mat;  // [L x D]
  FeatureSource source = FeatureSource::kMfccFallback;
  std::string utt_id;

  int length() const { return mat.rows; }
  int dim() const { return mat.cols; }
};

// "PFEA" file: {magic, u32 L, u32 D} + row-major float32, one per utterance.
FrameFeatures load_external_features(const std::string& path,
                                     const std::string& utt_id);
void save_features(const std::string& path, const FrameFeatures& f);

// 13 MFCCs + deltas + delta-deltas (D = 39) on the shared mel frame grid.
FrameFeatures mfcc_fallback(const dsp::Waveform& w, const dsp::DspConfig& cfg);

}  // namespace trivox::units

#endif  // TRIVOX_UNITS_FEATURES_H_
