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

#include <cmath>
#include <filesystem>

#include "core/rng.h"
#include "dsp/augment.h"
#include "dsp/griffin_lim.h"
#include "dsp/mel.h"
#include "dsp/signal.h"
#include "pipeline/toy_corpus.h"

using namespace trivox;
using dsp::DspConfig;
using dsp::Waveform;

namespace {
constexpr double kPi = 3.14159265358979323846;

Waveform sine(double freq, double seconds, int sr = 16000, double amp = 1.0) {
  Waveform w;
  w.sample_rate = sr;
  w.utt_id = "sine";
  const auto n = int64_t(seconds * sr);
  w.samples.resize(size_t(n));
  for (int64_t i = 0; i < n; ++i)
    w.samples[size_t(i)] = float(amp * std::sin(2.0 * kPi * freq * i / sr));
  return w;
}

Waveform silence(double seconds, int sr = 16000) {
  Waveform w;
  w.sample_rate = sr;
  w.utt_id = "silence";
  w.samples.assign(size_t(seconds * sr), 0.0f);
  return w;
}

Waveform noise(double seconds, uint64_t seed, int sr = 16000) {
  Waveform w;
  w.sample_rate = sr;
  w.utt_id = "noise";
  Rng rng(seed);
  w.samples.resize(size_t(seconds * sr));
  for (auto& s : w.samples) s = float(0.3 * rng.uniform(-1.0, 1.0));
  return w;
}

Waveform speechlike() {
  pipeline::ToyCorpusSpec spec;
  spec.duration_s = 0.7;
  return pipeline::toy_utterance(spec, 0, 0, 0, "neutral");
}
}  // namespace

TEST_CASE("mel framing follows 1 + floor((T - win)/hop)") {
  DspConfig cfg;
  const auto m = dsp::compute_mel(sine(440.0, 1.0), cfg);
  CHECK(m.n_frames() == 59);  // 1 + (16000 - 1024) / 256
  CHECK(m.n_channels() == 80);
  // Shorter than one window is rejected.
  Waveform tiny = sine(440.0, 0.05);
  tiny.samples.resize(1000);
  CHECK_THROWS_AS(dsp::compute_mel(tiny, cfg), Error);
}

TEST_CASE("all-zero waveform maps to the log clamp floor") {
  DspConfig cfg;
  const auto m = dsp::compute_mel(silence(1.0), cfg);
  const float floor_log = float(std::log(cfg.clamp_floor));
  for (const float v : m.frames.v) CHECK(v == floor_log);
}

TEST_CASE("440 Hz sine peaks at the mel channel nearest 440 Hz") {
  DspConfig cfg;
  const auto m = dsp::compute_mel(sine(440.0, 1.0), cfg);
  // Independent center-frequency table from the mel-scale definition.
  const double mel_lo = 0.0;
  const double mel_hi = 2595.0 * std::log10(1.0 + cfg.fmax_hz / 700.0);
  int nearest = 0;
  double best = 1e30;
  for (int c = 0; c < cfg.n_mel; ++c) {
    const double mel = mel_lo + (mel_hi - mel_lo) * (c + 1) / (cfg.n_mel + 1);
    const double hz = 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
    if (std::abs(hz - 440.0) < best) {
      best = std::abs(hz - 440.0);
      nearest = c;
    }
  }
  for (int t = 5; t < m.n_frames() - 5; ++t) {
    const float* row = m.frames.row(t);
    const int argmax =
        int(std::max_element(row, row + cfg.n_mel) - row);
    CHECK(argmax == nearest);
  }
}

TEST_CASE("mel is pure: identical runs are bit-identical") {
  DspConfig cfg;
  const auto w = speechlike();
  const auto a = dsp::compute_mel(w, cfg);
  const auto b = dsp::compute_mel(w, cfg);
  CHECK(a.frames.v == b.frames.v);
}

TEST_CASE("sample-rate mismatch is rejected, not resampled") {
  DspConfig cfg;
  Waveform w = sine(440.0, 1.0, 8000);
  CHECK_THROWS_AS(dsp::compute_mel(w, cfg), Error);
  CHECK_THROWS_AS(dsp::extract_f0(w, cfg), Error);
}

TEST_CASE("pitch: silence is unvoiced everywhere") {
  DspConfig cfg;
  const auto p = dsp::extract_f0(silence(1.0), cfg);
  for (double v : p.f0_hz) CHECK(v == 0.0);
}

TEST_CASE("pitch: 200 Hz tone tracks within 5 Hz") {
  DspConfig cfg;
  const auto p = dsp::extract_f0(sine(200.0, 1.0, 16000, 0.5), cfg);
  std::vector<double> voiced;
  for (double v : p.f0_hz)
    if (v > 0.0) voiced.push_back(v);
  REQUIRE(voiced.size() > p.f0_hz.size() / 2);
  std::sort(voiced.begin(), voiced.end());
  const double median = voiced[voiced.size() / 2];
  CHECK(median == doctest::Approx(200.0).epsilon(0.025));
}

TEST_CASE("pitch: seeded white noise is mostly unvoiced") {
  DspConfig cfg;
  const auto p = dsp::extract_f0(noise(1.0, 1234), cfg);
  int unvoiced = 0;
  for (double v : p.f0_hz)
    if (v == 0.0) ++unvoiced;
  CHECK(double(unvoiced) / double(p.f0_hz.size()) >= 0.9);
}

TEST_CASE("pitch values respect the Nyquist bound and the frame grid") {
  DspConfig cfg;
  const auto w = speechlike();
  const auto p = dsp::extract_f0(w, cfg);
  const auto m = dsp::compute_mel(w, cfg);
  CHECK(int(p.f0_hz.size()) == m.n_frames());
  for (double v : p.f0_hz) {
    CHECK(v >= 0.0);
    CHECK(v < cfg.sample_rate / 2.0);
  }
}

TEST_CASE("cepstra: direct-summation DCT oracle within 1e-9") {
  DspConfig cfg;
  const auto w = speechlike();
  const auto mel = dsp::compute_mel(w, cfg);
  const auto cep = dsp::mel_cepstra(w, cfg);
  CHECK(cep.coeffs.rows == mel.n_frames());
  CHECK(cep.coeffs.cols == 24);
  // Oracle: brute-force orthonormal DCT-II on the same log-mel rows.
  const int n = mel.n_channels();
  for (int t = 0; t < mel.n_frames(); ++t) {
    for (int k = 1; k <= 24; ++k) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i)
        acc += double(mel.frames.at(t, i)) *
               std::cos(kPi * (2.0 * i + 1.0) * k / (2.0 * n));
      acc *= std::sqrt(2.0 / n);
      CHECK(std::abs(acc - cep.coeffs.at(t, k - 1)) < 1e-9);
    }
  }
}

TEST_CASE("cepstra: constant spectrum rows collapse to zero") {
  DspConfig cfg;
  const auto cep = dsp::mel_cepstra(silence(0.5), cfg);
  for (const double v : cep.coeffs.v) CHECK(std::abs(v) < 1e-9);
}

TEST_CASE("speed perturb: identity and length formula") {
  const auto w = sine(300.0, 1.0);
  const auto same = dsp::speed_perturb(w, 1.0);
  CHECK(same.samples == w.samples);  // bit-identical
  CHECK(dsp::speed_perturb(w, 0.9).samples.size() == 17778);
  CHECK(dsp::speed_perturb(w, 1.1).samples.size() == 14545);
  CHECK_THROWS_AS(dsp::speed_perturb(w, 0.0), Error);
  CHECK_THROWS_AS(dsp::speed_perturb(w, -1.0), Error);
}

TEST_CASE("speed perturb shifts pitch with tempo") {
  DspConfig cfg;
  const auto w = sine(200.0, 1.0, 16000, 0.5);
  const auto fast = dsp::speed_perturb(w, 1.1);
  const auto p = dsp::extract_f0(fast, cfg);
  std::vector<double> voiced;
  for (double v : p.f0_hz)
    if (v > 0.0) voiced.push_back(v);
  REQUIRE(!voiced.empty());
  std::sort(voiced.begin(), voiced.end());
  CHECK(voiced[voiced.size() / 2] == doctest::Approx(220.0).epsilon(0.03));
}

TEST_CASE("spec augment: bounds, no-op, determinism, untouched cells") {
  DspConfig cfg;
  const auto mel = dsp::compute_mel(speechlike(), cfg);

  dsp::AugmentSpec none;
  none.n_freq_masks = 0;
  CHECK(dsp::spec_augment(mel, none).frames.v == mel.frames.v);

  dsp::AugmentSpec spec;
  spec.n_freq_masks = 2;
  spec.max_mask_width = 50;
  spec.rng_seed = 9;
  const auto a = dsp::spec_augment(mel, spec);
  const auto b = dsp::spec_augment(mel, spec);
  CHECK(a.frames.v == b.frames.v);  // same seed, same masks

  // Masked cells are exactly the floor; unmasked cells are untouched; the
  // masked channel set is at most two bands of width <= 50.
  std::vector<char> masked_channel(size_t(mel.n_channels()), 0);
  int masked_cells = 0;
  for (int c = 0; c < mel.n_channels(); ++c) {
    bool col_differs = false;
    for (int t = 0; t < mel.n_frames(); ++t) {
      if (a.frames.at(t, c) != mel.frames.at(t, c)) {
        col_differs = true;
        CHECK(a.frames.at(t, c) == mel.log_floor);
        ++masked_cells;
      }
    }
    masked_channel[size_t(c)] = col_differs;
  }
  int width = 0;
  for (char m : masked_channel) width += m;
  CHECK(width <= 2 * 50);
  CHECK(masked_cells <= 2 * 50 * mel.n_frames());
}

TEST_CASE("griffin-lim: round trip, degenerate input, length arithmetic") {
  DspConfig cfg;
  const auto w = speechlike();
  const auto mel = dsp::compute_mel(w, cfg);
  const auto rec = dsp::invert_mel(mel, 60, cfg);
  // Sample count within one window of n_frames * hop.
  const auto expect = int64_t(mel.n_frames()) * cfg.hop_samples;
  CHECK(std::abs(int64_t(rec.samples.size()) - expect) <= cfg.win_samples);

  const auto mel2 = dsp::compute_mel(rec, cfg);
  const int frames = std::min(mel.n_frames(), mel2.n_frames());
  double cos_sum = 0.0;
  for (int t = 0; t < frames; ++t) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (int c = 0; c < cfg.n_mel; ++c) {
      const double x = mel.frames.at(t, c), y = mel2.frames.at(t, c);
      dot += x * y;
      na += x * x;
      nb += y * y;
    }
    cos_sum += dot / std::sqrt(na * nb + 1e-12);
  }
  CHECK(cos_sum / frames > 0.7);

  // All-floor mel inverts to near silence.
  dsp::MelSpectrogram flat = mel;
  flat.frames.fill(flat.log_floor);
  const auto quiet = dsp::invert_mel(flat, 10, cfg);
  double rms = 0.0;
  for (float s : quiet.samples) rms += double(s) * double(s);
  rms = std::sqrt(rms / double(quiet.samples.size()));
  CHECK(rms < 1e-3);
}

TEST_CASE("wav io round trip and format rejection") {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "trivox_dsp_test";
  fs::create_directories(dir);
  const auto w = speechlike();
  const std::string path = (dir / "x.wav").string();
  dsp::write_wav(path, w);
  const auto r = dsp::read_wav(path, "x");
  REQUIRE(r.samples.size() == w.samples.size());
  CHECK(r.sample_rate == w.sample_rate);
  for (size_t i = 0; i < r.samples.size(); i += 997)
    CHECK(std::abs(r.samples[i] - w.samples[i]) < 2.0f / 32768.0f);
  CHECK_THROWS_AS(dsp::read_wav((dir / "missing.wav").string(), "m"), Error);
}

TEST_CASE("mel and pitch persistence round trips") {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "trivox_dsp_test";
  fs::create_directories(dir);
  DspConfig cfg;
  const auto mel = dsp::compute_mel(speechlike(), cfg);
  const std::string mpath = (dir / "x.pmel").string();
  dsp::write_mel(mpath, mel);
  const auto r = dsp::read_mel(mpath);
  CHECK(r.frames.v == mel.frames.v);  // float32 on disk, bit-exact
  CHECK(r.sample_rate == mel.sample_rate);
  CHECK(r.hop_samples == mel.hop_samples);

  const auto p = dsp::extract_f0(speechlike(), cfg);
  const std::string ppath = (dir / "x.f0").string();
  dsp::write_pitch(ppath, p);
  const auto q = dsp::read_pitch(ppath);
  REQUIRE(q.f0_hz.size() == p.f0_hz.size());
  for (size_t i = 0; i < p.f0_hz.size(); ++i)
    CHECK(q.f0_hz[i] == doctest::Approx(p.f0_hz[i]).epsilon(1e-6));
}

TEST_CASE("shared frame grid across mel, pitch, cepstra") {
  DspConfig cfg;
  const auto w = speechlike();
  const int frames = dsp::compute_mel(w, cfg).n_frames();
  CHECK(int(dsp::extract_f0(w, cfg).f0_hz.size()) == frames);
  CHECK(dsp::mel_cepstra(w, cfg).coeffs.rows == frames);
  CHECK(dsp::mfcc_features(w, cfg).rows == frames);
}
