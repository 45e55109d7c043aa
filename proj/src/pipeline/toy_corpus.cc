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

#include "pipeline/toy_corpus.h"

#include <cmath>
#include <filesystem>

#include "core/check.h"
#include "core/rng.h"

namespace trivox::pipeline {

namespace {
constexpr double kTwoPi = 6.28318530717958647692528676655900577;

struct EmotionShape {
  double f0_scale;    // relative to the speaker's base pitch
  double f0_slope;    // relative rise/fall across the utterance
  double vibrato;     // pitch modulation depth
  double tempo;       // syllable-rate multiplier
  double energy;
};

EmotionShape shape_of(const std::string& emotion, double strength) {
  EmotionShape s{1.0, 0.0, 0.0, 1.0, 1.0};
  if (emotion == "angry") s = {1.45, 0.25, 0.02, 1.35, 1.3};
  if (emotion == "happy") s = {1.3, 0.1, 0.08, 1.15, 1.1};
  if (emotion == "sad") s = {0.75, -0.2, 0.01, 0.7, 0.8};
  if (emotion == "excited") s = {1.33, 0.12, 0.09, 1.2, 1.15};  // happy-adjacent
  s.f0_scale = 1.0 + (s.f0_scale - 1.0) * strength;
  s.f0_slope *= strength;
  s.vibrato *= strength;
  s.tempo = 1.0 + (s.tempo - 1.0) * strength;
  s.energy = 1.0 + (s.energy - 1.0) * strength;
  return s;
}
}  // namespace

dsp::Waveform toy_utterance(const ToyCorpusSpec& spec, int session, int speaker,
                            int utt, const std::string& emotion) {
  Rng rng(Rng::mix(spec.seed, uint64_t(session) * 1000003 + uint64_t(speaker),
                   uint64_t(utt), 0x70c0));
  const EmotionShape em = shape_of(emotion, spec.emotion_strength);

  // Voice: base pitch and a formant "home" per speaker.
  const int voice = spec.speaker_dependent_voice
                        ? session * spec.speakers_per_session + speaker
                        : 0;
  Rng voice_rng(Rng::mix(spec.seed, 0xb01ce, uint64_t(voice)));
  const double base_f0 = 105.0 + 30.0 * (voice % 5) + voice_rng.uniform(-8, 8);
  const double f1_home = 380.0 + voice_rng.uniform(0, 220);
  const double f2_home = 1100.0 + voice_rng.uniform(0, 900);

  const double dur =
      spec.duration_s * (1.0 + spec.duration_jitter * rng.uniform(-1.0, 1.0));
  const int sr = spec.sample_rate;
  const auto n = int64_t(dur * sr);

  // Syllables: piecewise formant targets with short energy dips between.
  const double syllable_s = 0.09 / em.tempo;
  const int n_syll = std::max(2, int(dur / syllable_s));
  std::vector<double> f1(static_cast<size_t>(n_syll)), f2(static_cast<size_t>(n_syll)), amp(static_cast<size_t>(n_syll));
  for (int i = 0; i < n_syll; ++i) {
    f1[size_t(i)] = f1_home + rng.uniform(-140, 260);
    f2[size_t(i)] = f2_home + rng.uniform(-350, 700);
    amp[size_t(i)] = 0.6 + 0.4 * rng.uniform();
  }

  dsp::Waveform w;
  w.sample_rate = sr;
  w.samples.resize(size_t(n));
  double phase = 0.0;
  const double f0_mid = base_f0 * em.f0_scale;
  for (int64_t i = 0; i < n; ++i) {
    const double t = double(i) / sr;
    const double pos = t / dur;  // 0..1
    const double f0 =
        f0_mid * (1.0 + em.f0_slope * (pos - 0.5)) *
        (1.0 + em.vibrato * std::sin(kTwoPi * 5.5 * t));
    phase += kTwoPi * f0 / sr;

    const double syl_pos = pos * n_syll;
    const int syl = std::min(n_syll - 1, int(syl_pos));
    const double within = syl_pos - syl;
    // Short dip at syllable boundaries gives unit/rhythm structure.
    const double gate = 0.25 + 0.75 * std::min(1.0, std::min(within, 1.0 - within) * 6.0);

    double sample = 0.0;
    for (int h = 1; h * f0 < 3800.0; ++h) {
      const double hf = h * f0;
      const double a =
          std::exp(-std::pow((hf - f1[size_t(syl)]) / 160.0, 2.0)) +
          0.6 * std::exp(-std::pow((hf - f2[size_t(syl)]) / 260.0, 2.0)) +
          0.08;
      sample += a * std::sin(phase * h);
    }
    sample *= amp[size_t(syl)] * gate * em.energy;
    sample += 0.003 * rng.normal();  // breath noise
    w.samples[size_t(i)] = float(sample);
  }
  // Normalize to a fixed peak.
  float peak = 1e-9f;
  for (float s : w.samples) peak = std::max(peak, std::abs(s));
  for (float& s : w.samples) s *= 0.35f / peak;
  return w;
}

Manifest generate_toy_corpus(const ToyCorpusSpec& spec,
                             const std::string& out_dir) {
  namespace fs = std::filesystem;
  TVX_CHECK(spec.n_sessions >= 1 && spec.speakers_per_session >= 1 &&
            spec.utts_per_speaker >= 1)
      << "degenerate toy corpus spec";
  fs::create_directories(out_dir + "/wav");

  Manifest m;
  m.corpus_name = "toy";
  int emo_cursor = 0;
  for (int se = 0; se < spec.n_sessions; ++se) {
    for (int sp = 0; sp < spec.speakers_per_session; ++sp) {
      for (int u = 0; u < spec.utts_per_speaker; ++u) {
        const std::string emotion =
            spec.emotions[size_t(emo_cursor++) % spec.emotions.size()];
        const auto wav = toy_utterance(spec, se, sp, u, emotion);
        ManifestRow row;
        row.session_id = "S" + std::to_string(se + 1);
        row.speaker_id = row.session_id + "_spk" + std::to_string(sp + 1);
        row.utt_id = row.speaker_id + "_u" + std::to_string(u + 1);
        row.raw_label = emotion;
        row.language = "toy";
        row.wav_path = out_dir + "/wav/" + row.utt_id + ".wav";
        dsp::Waveform named = wav;
        named.utt_id = row.utt_id;
        dsp::write_wav(row.wav_path, named);
        m.rows.push_back(std::move(row));
      }
    }
  }
  save_manifest(out_dir + "/manifest.txt", m);
  return m;
}

}  // namespace trivox::pipeline
