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

#ifndef TRIVOX_DSP_MEL_H_
#define TRIVOX_DSP_MEL_H_

#include <complex>
#include <string>
#include <vector>

#include "core/tensor.h"
#include "dsp/signal.h"

namespace trivox::dsp {

// Front-end parameters. Defaults: 16 kHz audio, 1024-point FFT, 64 ms
// window / 16 ms hop, 80 mel channels over 0-8000 Hz with slaney-style area
// normalization (HTK mel scale), natural log with a 1e-5 clamp floor,
// periodic Hann window, no center padding.
struct DspConfig {
  int sample_rate = 16000;
  int n_fft = 1024;
  int win_samples = 1024;
  int hop_samples = 256;
  int n_mel = 80;
  double fmin_hz = 0.0;
  double fmax_hz = 8000.0;
  double clamp_floor = 1e-5;
  // Pitch tracker: autocorrelation over the mel frame grid.
  double f0_min_hz = 60.0;
  double f0_max_hz = 400.0;
  double voicing_threshold = 0.3;
  int n_cepstra = 24;  // MCD keeps coefficients 1..24
  int n_mfcc = 13;     // fallback features: 13 MFCCs + deltas + delta-deltas

  double log_floor() const;
  // Frames fully inside the signal: 1 + floor((T - win) / hop).
  // Throws if the signal is shorter than one window.
  int num_frames(int64_t n_samples) const;
};

struct MelSpectrogram {
  TensorF frames;  // [n_frames x n_mel], log mel energies
  int sample_rate = 0;
  int hop_samples = 0;
  int win_samples = 0;
  int n_fft = 0;
  float log_floor = 0.0f;

  int n_frames() const { return frames.rows; }
  int n_channels() const { return frames.cols; }
};

struct PitchTrack {
  std::vector<double> f0_hz;  // one per mel frame, 0.0 when unvoiced
};

struct MelCepstra {
  TensorD coeffs;  // [n_frames x 24], DCT-II coefficients 1..24
};

// Triangular mel filterbank [n_mel x (n_fft/2 + 1)], area-normalized.
TensorD mel_filterbank(const DspConfig& cfg);
// Center frequency (Hz) of each mel channel, for diagnostics and tests.
std::vector<double> mel_center_frequencies(const DspConfig& cfg);

MelSpectrogram compute_mel(const Waveform& w, const DspConfig& cfg);
PitchTrack extract_f0(const Waveform& w, const DspConfig& cfg);
MelCepstra mel_cepstra(const Waveform& w, const DspConfig& cfg);
// Cepstra straight from log-mel frames; used to score generated mels that
// have no waveform behind them.
MelCepstra cepstra_from_mel(const MelSpectrogram& m, int n_cepstra);

// 13 MFCCs (c0..c12) + deltas + delta-deltas, D = 39, on the mel frame grid.
TensorF mfcc_features(const Waveform& w, const DspConfig& cfg);

// Orthonormal DCT-II of each row; returns [rows x n_out] keeping
// coefficients [first, first + n_out).
TensorD dct2_rows(const TensorF& x, int first, int n_out);

// Persistence. Mel: "PMEL" header + row-major float32. Pitch: one value per
// line, text.
void write_mel(const std::string& path, const MelSpectrogram& m);
MelSpectrogram read_mel(const std::string& path);
void write_pitch(const std::string& path, const PitchTrack& p);
PitchTrack read_pitch(const std::string& path);

// Shared STFT machinery (also used by the mel inverter).
struct Stft {
  explicit Stft(const DspConfig& cfg);
  int n_bins() const { return cfg_.n_fft / 2 + 1; }
  // Complex one-sided spectra, [n_frames x n_bins] flattened per frame.
  std::vector<std::vector<std::complex<double>>> forward(
      const std::vector<float>& samples) const;
  // Overlap-add inverse with squared-window normalization.
  std::vector<float> inverse(
      const std::vector<std::vector<std::complex<double>>>& spec) const;

  const DspConfig cfg_;
  std::vector<double> window_;
};

}  // namespace trivox::dsp

#endif  // TRIVOX_DSP_MEL_H_
