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

#include "dsp/signal.h"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "core/binio.h"
#include "core/check.h"

namespace trivox::dsp {

void validate(const Waveform& w) {
  TVX_CHECK(!w.samples.empty()) << "empty waveform (utt " << w.utt_id << ")";
  TVX_CHECK(w.sample_rate > 0) << "non-positive sample rate";
  for (float s : w.samples) {
    TVX_CHECK(std::isfinite(s)) << "non-finite sample in utt " << w.utt_id;
    TVX_CHECK(s >= -1.0f && s <= 1.0f)
        << "sample out of [-1, 1] in utt " << w.utt_id;
  }
}

Waveform read_wav(const std::string& path, const std::string& utt_id) {
  auto is = binio::open_in(path);
  binio::expect_magic(is, "RIFF", path);
  binio::read_pod<uint32_t>(is, "riff size");
  binio::expect_magic(is, "WAVE", path);

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  bool have_fmt = false;
  std::vector<char> data;
  while (is && is.peek() != EOF) {
    char id[4];
    is.read(id, 4);
    if (!is) break;
    const auto chunk_size = binio::read_pod<uint32_t>(is, "chunk size");
    if (std::memcmp(id, "fmt ", 4) == 0) {
      TVX_CHECK(chunk_size >= 16) << path << ": short fmt chunk";
      format = binio::read_pod<uint16_t>(is, "fmt");
      channels = binio::read_pod<uint16_t>(is, "channels");
      rate = binio::read_pod<uint32_t>(is, "rate");
      binio::read_pod<uint32_t>(is, "byte rate");
      binio::read_pod<uint16_t>(is, "block align");
      bits = binio::read_pod<uint16_t>(is, "bits");
      is.ignore(chunk_size - 16);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data.resize(chunk_size);
      binio::read_array(is, data.data(), chunk_size, "wav data");
    } else {
      is.ignore(chunk_size + (chunk_size & 1));
    }
  }
  TVX_CHECK(have_fmt && !data.empty()) << path << ": missing fmt or data chunk";
  TVX_CHECK(format == 1) << path << ": only PCM wav supported";
  TVX_CHECK(bits == 16) << path << ": only 16-bit wav supported, got " << bits;
  TVX_CHECK(channels == 1) << path << ": only mono wav supported, got "
                           << channels;

  Waveform w;
  w.sample_rate = int(rate);
  w.utt_id = utt_id;
  const size_t n = data.size() / 2;
  w.samples.resize(n);
  for (size_t i = 0; i < n; ++i) {
    int16_t s;
    std::memcpy(&s, data.data() + 2 * i, 2);
    w.samples[i] = float(s) / 32768.0f;
  }
  validate(w);
  return w;
}

void write_wav(const std::string& path, const Waveform& w) {
  validate(w);
  auto os = binio::open_out(path);
  const uint32_t data_bytes = uint32_t(w.samples.size() * 2);
  binio::write_magic(os, "RIFF");
  binio::write_pod<uint32_t>(os, 36 + data_bytes);
  binio::write_magic(os, "WAVE");
  binio::write_magic(os, "fmt ");
  binio::write_pod<uint32_t>(os, 16);
  binio::write_pod<uint16_t>(os, 1);  // PCM
  binio::write_pod<uint16_t>(os, 1);  // mono
  binio::write_pod<uint32_t>(os, uint32_t(w.sample_rate));
  binio::write_pod<uint32_t>(os, uint32_t(w.sample_rate) * 2);
  binio::write_pod<uint16_t>(os, 2);
  binio::write_pod<uint16_t>(os, 16);
  binio::write_magic(os, "data");
  binio::write_pod<uint32_t>(os, data_bytes);
  for (float s : w.samples) {
    const float c = std::clamp(s, -1.0f, 1.0f);
    const auto q = int16_t(std::lrint(c * 32767.0f));
    binio::write_pod<int16_t>(os, q);
  }
}

}  // namespace trivox::dsp
