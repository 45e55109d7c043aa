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

#include "dsp/mel.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>

#include "core/binio.h"
#include "core/check.h"
#include "dsp/fft.h"

namespace trivox::dsp {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

std::vector<double> hann_periodic(int n) {
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * i / n);
  return w;
}

std::vector<double> filter_edges_hz(const DspConfig& cfg) {
  const double mel_lo = hz_to_mel(cfg.fmin_hz);
  const double mel_hi = hz_to_mel(cfg.fmax_hz);
  std::vector<double> hz(cfg.n_mel + 2);
  for (int m = 0; m < cfg.n_mel + 2; ++m)
    hz[m] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * m / (cfg.n_mel + 1));
  return hz;
}
}  // namespace

double DspConfig::log_floor() const { return std::log(clamp_floor); }

int DspConfig::num_frames(int64_t n_samples) const {
  TVX_CHECK(n_samples >= win_samples)
      << "utterance too short: " << n_samples << " samples < one window of "
      << win_samples;
  return int(1 + (n_samples - win_samples) / hop_samples);
}

TensorD mel_filterbank(const DspConfig& cfg) {
  const int n_bins = cfg.n_fft / 2 + 1;
  const auto hz = filter_edges_hz(cfg);
  TensorD fb(cfg.n_mel, n_bins);
  for (int m = 0; m < cfg.n_mel; ++m) {
    const double lo = hz[m], c = hz[m + 1], hi = hz[m + 2];
    const double norm = 2.0 / (hi - lo);  // slaney-style area normalization
    for (int k = 0; k < n_bins; ++k) {
      const double f = double(k) * cfg.sample_rate / cfg.n_fft;
      double wgt = 0.0;
      if (f > lo && f < c)
        wgt = (f - lo) / (c - lo);
      else if (f >= c && f < hi)
        wgt = (hi - f) / (hi - c);
      fb.at(m, k) = wgt * norm;
    }
  }
  return fb;
}

std::vector<double> mel_center_frequencies(const DspConfig& cfg) {
  const auto hz = filter_edges_hz(cfg);
  return {hz.begin() + 1, hz.end() - 1};
}

Stft::Stft(const DspConfig& cfg) : cfg_(cfg), window_(hann_periodic(cfg.win_samples)) {
  TVX_CHECK(is_power_of_two(cfg.n_fft)) << "n_fft must be a power of two";
  TVX_CHECK(cfg.win_samples <= cfg.n_fft) << "window larger than FFT size";
}

std::vector<std::vector<std::complex<double>>> Stft::forward(
    const std::vector<float>& samples) const {
  const int n_frames = cfg_.num_frames(int64_t(samples.size()));
  const int n_bins = this->n_bins();
  std::vector<std::vector<std::complex<double>>> out(static_cast<size_t>(n_frames));
  std::vector<std::complex<double>> buf(static_cast<size_t>(cfg_.n_fft));
  for (int t = 0; t < n_frames; ++t) {
    const int64_t off = int64_t(t) * cfg_.hop_samples;
    for (int i = 0; i < cfg_.win_samples; ++i)
      buf[size_t(i)] = {double(samples[size_t(off + i)]) * window_[size_t(i)], 0.0};
    for (int i = cfg_.win_samples; i < cfg_.n_fft; ++i) buf[size_t(i)] = {0.0, 0.0};
    fft(buf, false);
    out[size_t(t)].assign(buf.begin(), buf.begin() + n_bins);
  }
  return out;
}

std::vector<float> Stft::inverse(
    const std::vector<std::vector<std::complex<double>>>& spec) const {
  const int n_frames = int(spec.size());
  TVX_CHECK(n_frames > 0) << "empty spectrogram";
  const int n_bins = this->n_bins();
  const int64_t n_out = int64_t(n_frames - 1) * cfg_.hop_samples + cfg_.win_samples;
  std::vector<double> acc(size_t(n_out), 0.0), wsum(size_t(n_out), 0.0);
  std::vector<std::complex<double>> buf(static_cast<size_t>(cfg_.n_fft));
  for (int t = 0; t < n_frames; ++t) {
    TVX_CHECK(int(spec[size_t(t)].size()) == n_bins) << "bad spectrum width";
    for (int k = 0; k < n_bins; ++k) buf[size_t(k)] = spec[size_t(t)][size_t(k)];
    for (int k = n_bins; k < cfg_.n_fft; ++k)
      buf[size_t(k)] = std::conj(spec[size_t(t)][size_t(cfg_.n_fft - k)]);
    fft(buf, true);
    const int64_t off = int64_t(t) * cfg_.hop_samples;
    for (int i = 0; i < cfg_.win_samples; ++i) {
      acc[size_t(off + i)] += buf[size_t(i)].real() * window_[size_t(i)];
      wsum[size_t(off + i)] += window_[size_t(i)] * window_[size_t(i)];
    }
  }
  std::vector<float> out(static_cast<size_t>(n_out));
  for (int64_t i = 0; i < n_out; ++i)
    out[size_t(i)] = float(acc[size_t(i)] / std::max(wsum[size_t(i)], 1e-8));
  return out;
}

MelSpectrogram compute_mel(const Waveform& w, const DspConfig& cfg) {
  validate(w);
  TVX_CHECK(w.sample_rate == cfg.sample_rate)
      << "sample rate mismatch: waveform " << w.sample_rate << " vs configured "
      << cfg.sample_rate << " (utt " << w.utt_id << ")";
  const Stft stft(cfg);
  const auto spec = stft.forward(w.samples);
  const TensorD fb = mel_filterbank(cfg);
  const int n_bins = stft.n_bins();

  MelSpectrogram m;
  m.frames = TensorF(int(spec.size()), cfg.n_mel);
  m.sample_rate = cfg.sample_rate;
  m.hop_samples = cfg.hop_samples;
  m.win_samples = cfg.win_samples;
  m.n_fft = cfg.n_fft;
  m.log_floor = float(cfg.log_floor());

  std::vector<double> mag(static_cast<size_t>(n_bins));
  for (int t = 0; t < int(spec.size()); ++t) {
    for (int k = 0; k < n_bins; ++k) mag[size_t(k)] = std::abs(spec[size_t(t)][size_t(k)]);
    for (int c = 0; c < cfg.n_mel; ++c) {
      double e = 0.0;
      const double* f = fb.row(c);
      for (int k = 0; k < n_bins; ++k) e += f[k] * mag[size_t(k)];
      m.frames.at(t, c) = float(std::log(std::max(e, cfg.clamp_floor)));
    }
  }
  return m;
}

TensorD dct2_rows(const TensorF& x, int first, int n_out) {
  const int n = x.cols;
  TensorD out(x.rows, n_out);
  const double s0 = std::sqrt(1.0 / n), sk = std::sqrt(2.0 / n);
  for (int r = 0; r < x.rows; ++r) {
    for (int j = 0; j < n_out; ++j) {
      const int k = first + j;
      double acc = 0.0;
      for (int i = 0; i < n; ++i)
        acc += double(x.at(r, i)) * std::cos(kPi * (2.0 * i + 1.0) * k / (2.0 * n));
      out.at(r, j) = acc * (k == 0 ? s0 : sk);
    }
  }
  return out;
}

MelCepstra cepstra_from_mel(const MelSpectrogram& m, int n_cepstra) {
  TVX_CHECK(m.n_frames() > 0) << "empty mel spectrogram";
  return {dct2_rows(m.frames, 1, n_cepstra)};
}

MelCepstra mel_cepstra(const Waveform& w, const DspConfig& cfg) {
  return cepstra_from_mel(compute_mel(w, cfg), cfg.n_cepstra);
}

PitchTrack extract_f0(const Waveform& w, const DspConfig& cfg) {
  validate(w);
  TVX_CHECK(w.sample_rate == cfg.sample_rate)
      << "sample rate mismatch in extract_f0 (utt " << w.utt_id << ")";
  const int n_frames = cfg.num_frames(int64_t(w.samples.size()));
  const int win = cfg.win_samples;
  const int lag_min = std::max(2, int(cfg.sample_rate / cfg.f0_max_hz));
  const int lag_max =
      std::min(win - 2, int(std::ceil(cfg.sample_rate / cfg.f0_min_hz)));
  TVX_CHECK(lag_min < lag_max) << "bad pitch search range";

  PitchTrack p;
  p.f0_hz.assign(size_t(n_frames), 0.0);
  std::vector<double> x(static_cast<size_t>(win));
  std::vector<double> r(size_t(lag_max) + 2, 0.0);
  for (int t = 0; t < n_frames; ++t) {
    const int64_t off = int64_t(t) * cfg.hop_samples;
    double mean = 0.0;
    for (int i = 0; i < win; ++i) mean += w.samples[size_t(off + i)];
    mean /= win;
    for (int i = 0; i < win; ++i) x[size_t(i)] = double(w.samples[size_t(off + i)]) - mean;

    double r0 = 0.0;
    for (int i = 0; i < win; ++i) r0 += x[size_t(i)] * x[size_t(i)];
    if (r0 < 1e-10) continue;  // silence: unvoiced

    for (int lag = lag_min - 1; lag <= lag_max + 1 && lag < win; ++lag) {
      double s = 0.0;
      for (int i = 0; i + lag < win; ++i) s += x[size_t(i)] * x[size_t(i) + size_t(lag)];
      r[size_t(lag)] = s / r0;
    }
    int best = lag_min;
    for (int lag = lag_min; lag <= lag_max; ++lag)
      if (r[size_t(lag)] > r[size_t(best)]) best = lag;
    if (r[size_t(best)] < cfg.voicing_threshold) continue;

    // Parabolic refinement around the peak.
    double lag = double(best);
    if (best > lag_min && best < lag_max) {
      const double a = r[size_t(best) - 1], b = r[size_t(best)], c = r[size_t(best) + 1];
      const double denom = a - 2.0 * b + c;
      if (std::abs(denom) > 1e-12) {
        const double delta = 0.5 * (a - c) / denom;
        if (std::abs(delta) < 1.0) lag += delta;
      }
    }
    const double f0 = cfg.sample_rate / lag;
    if (f0 >= cfg.f0_min_hz && f0 <= cfg.f0_max_hz) p.f0_hz[size_t(t)] = f0;
  }
  return p;
}

TensorF mfcc_features(const Waveform& w, const DspConfig& cfg) {
  const MelSpectrogram m = compute_mel(w, cfg);
  const TensorD c = dct2_rows(m.frames, 0, cfg.n_mfcc);
  const int T = c.rows, D = cfg.n_mfcc;
  TensorF out(T, 3 * D);
  auto cl = [&](int t) { return std::clamp(t, 0, T - 1); };
  // Static coefficients.
  for (int t = 0; t < T; ++t)
    for (int j = 0; j < D; ++j) out.at(t, j) = float(c.at(t, j));
  // Regression deltas over +-2 frames, then delta-deltas of the deltas.
  TensorD d1(T, D);
  for (int t = 0; t < T; ++t)
    for (int j = 0; j < D; ++j) {
      double num = 0.0;
      for (int n = 1; n <= 2; ++n)
        num += n * (c.at(cl(t + n), j) - c.at(cl(t - n), j));
      d1.at(t, j) = num / 10.0;
      out.at(t, D + j) = float(d1.at(t, j));
    }
  for (int t = 0; t < T; ++t)
    for (int j = 0; j < D; ++j) {
      double num = 0.0;
      for (int n = 1; n <= 2; ++n)
        num += n * (d1.at(cl(t + n), j) - d1.at(cl(t - n), j));
      out.at(t, 2 * D + j) = float(num / 10.0);
    }
  return out;
}

void write_mel(const std::string& path, const MelSpectrogram& m) {
  auto os = binio::open_out(path);
  binio::write_magic(os, "PMEL");
  binio::write_pod<uint32_t>(os, uint32_t(m.n_frames()));
  binio::write_pod<uint32_t>(os, uint32_t(m.n_channels()));
  binio::write_pod<uint32_t>(os, uint32_t(m.sample_rate));
  binio::write_pod<uint32_t>(os, uint32_t(m.hop_samples));
  binio::write_array(os, m.frames.data(), size_t(m.frames.size()));
}

MelSpectrogram read_mel(const std::string& path) {
  auto is = binio::open_in(path);
  binio::expect_magic(is, "PMEL", path);
  const auto n_frames = binio::read_pod<uint32_t>(is, "n_frames");
  const auto n_channels = binio::read_pod<uint32_t>(is, "n_channels");
  const auto rate = binio::read_pod<uint32_t>(is, "sample_rate");
  const auto hop = binio::read_pod<uint32_t>(is, "hop_samples");
  MelSpectrogram m;
  m.frames = TensorF(int(n_frames), int(n_channels));
  m.sample_rate = int(rate);
  m.hop_samples = int(hop);
  DspConfig defaults;
  m.win_samples = defaults.win_samples;
  m.n_fft = defaults.n_fft;
  m.log_floor = float(defaults.log_floor());
  binio::read_array(is, m.frames.data(), size_t(m.frames.size()), path.c_str());
  return m;
}

void write_pitch(const std::string& path, const PitchTrack& p) {
  std::ofstream os(path);
  TVX_CHECK(os.good()) << "cannot open for writing: " << path;
  os.precision(9);
  for (double v : p.f0_hz) os << v << "\n";
}

PitchTrack read_pitch(const std::string& path) {
  std::ifstream is(path);
  TVX_CHECK(is.good()) << "cannot open for reading: " << path;
  PitchTrack p;
  double v;
  while (is >> v) p.f0_hz.push_back(v);
  return p;
}

}  // namespace trivox::dsp
