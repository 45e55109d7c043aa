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

#ifndef TRIVOX_PIPELINE_TOY_CORPUS_H_
#define TRIVOX_PIPELINE_TOY_CORPUS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "dsp/signal.h"
#include "pipeline/manifest.h"

namespace trivox::pipeline {

// Seeded synthetic speech-like corpus: harmonic "syllables" with
// speaker-dependent voices and emotion-dependent pitch contours and tempo.
// Stands in for licensed corpora in tests and demos.
struct ToyCorpusSpec {
  int n_sessions = 1;
  int speakers_per_session = 2;
  int utts_per_speaker = 4;
  std::vector<std::string> emotions{"neutral", "angry", "happy", "sad"};
  double duration_s = 0.55;
  double duration_jitter = 0.15;  // relative
  double emotion_strength = 1.0;  // 0 disables emotion-dependent prosody
  bool speaker_dependent_voice = true;  // false: all speakers share a voice
  int sample_rate = 16000;
  uint64_t seed = 42;
};

// Synthesizes one utterance (no files written).
dsp::Waveform toy_utterance(const ToyCorpusSpec& spec, int session, int speaker,
                            int utt, const std::string& emotion);

// Writes WAVs under <out_dir>/wav/ and a manifest at <out_dir>/manifest.txt;
// returns the manifest.
Manifest generate_toy_corpus(const ToyCorpusSpec& spec,
                             const std::string& out_dir);

}  // namespace trivox::pipeline

#endif  // TRIVOX_PIPELINE_TOY_CORPUS_H_
