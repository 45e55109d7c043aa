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

#include "units/features.h"

#include <cstdint>

#include "core/binio.h"
#include "core/check.h"

namespace trivox::units {

FrameFeatures load_external_features(const std::string& path,
                                     const std::string& utt_id) {
  auto is = binio::open_in(path);
  binio::expect_magic(is, "PFEA", path);
  const auto L = binio::read_pod<uint32_t>(is, "feature length");
  const auto D = binio::read_pod<uint32_t>(is, "feature dim");
  TVX_CHECK(L >= 1 && D >= 1) << path << ": degenerate feature shape " << L
                              << "x" << D;
  FrameFeatures f;
  f.mat = TensorF(int(L), int(D));
  f.source = FeatureSource::kExternalSsl;
  f.utt_id = utt_id;
  binio::read_array(is, f.mat.data(), size_t(f.mat.size()), path.c_str());
  TVX_CHECK(f.mat.all_finite()) << path << ": non-finite feature values";
  return f;
}

void save_features(const std::string& path, const FrameFeatures& f) {
  auto os = binio::open_out(path);
  binio::write_magic(os, "PFEA");
  binio::write_pod<uint32_t>(os, uint32_t(f.length()));
  binio::write_pod<uint32_t>(os, uint32_t(f.dim()));
  binio::write_array(os, f.mat.data(), size_t(f.mat.size()));
}

FrameFeatures mfcc_fallback(const dsp::Waveform& w, const dsp::DspConfig& cfg) {
  FrameFeatures f;
  f.mat = dsp::mfcc_features(w, cfg);
  f.source = FeatureSource::kMfccFallback;
  f.utt_id = w.utt_id;
  return f;
}

}  // namespace trivox::units
