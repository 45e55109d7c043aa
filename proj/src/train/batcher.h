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

#ifndef TRIVOX_TRAIN_BATCHER_H_
#define TRIVOX_TRAIN_BATCHER_H_

#include <string>
#include <vector>

#include "dsp/augment.h"
#include "dsp/mel.h"

namespace trivox::train {

// One utterance with its speed-perturbed variants (factor 1.0 always at
// index of factor 1.0 in `factors`). Mels and refined units are aligned
// with `factors`.
struct TrainUtt {
  std::string utt_id;
  std::string speaker_id;
  std::vector<double> factors;
  std::vector<dsp::MelSpectrogram> mels;
  std::vector<std::vector<int>> units;  // refined ids per variant
};

struct TrainSample {
  int utt_index = -1;
  int variant = 0;
  TensorF target_mel;       // clean content mel
  std::vector<int> units;   // refined units of the same variant
  TensorF speaker_ref_mel;  // different same-speaker utterance, SpecAugmented
  TensorF prosody_mel;      // the content mel, SpecAugmented
  bool speaker_ref_is_self = false;  // single-utterance speaker fallback
};

// Deterministic batch maker: the sample stream of an epoch is a pure
// function of (seed, epoch), so replaying an epoch is bit-identical. The
// speaker reference is drawn uniformly from the speaker's other utterances
// (unperturbed variant); a speaker with a single utterance falls back to the
// utterance itself with a warning flag.
class Batcher {
 public:
  Batcher(const std::vector<TrainUtt>* utts, dsp::AugmentSpec augment,
          int batch_size, uint64_t seed);

  std::vector<std::vector<TrainSample>> epoch(int epoch_index) const;

  int utt_count() const { return int(utts_->size()); }

 private:
  TrainSample make_sample(int utt_index, uint64_t sample_seed) const;

  const std::vector<TrainUtt>* utts_;
  dsp::AugmentSpec augment_;
  int batch_size_;
  uint64_t seed_;
  std::vector<std::vector<int>> same_speaker_;  // per-utt: other utt indices
};

}  // namespace trivox::train

#endif  // TRIVOX_TRAIN_BATCHER_H_
