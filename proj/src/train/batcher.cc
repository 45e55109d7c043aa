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

#include "train/batcher.h"

#include <algorithm>
#include <iostream>

#include "core/check.h"
#include "core/rng.h"

namespace trivox::train {

Batcher::Batcher(const std::vector<TrainUtt>* utts, dsp::AugmentSpec augment,
                 int batch_size, uint64_t seed)
    : utts_(utts), augment_(augment), batch_size_(batch_size), seed_(seed) {
  TVX_CHECK(utts_ != nullptr && !utts_->empty()) << "no training utterances";
  TVX_CHECK(batch_size_ > 0) << "batch size must be positive";
  for (const auto& u : *utts_) {
    TVX_CHECK(!u.factors.empty() && u.factors.size() == u.mels.size() &&
              u.factors.size() == u.units.size())
        << "utterance " << u.utt_id << " has inconsistent variants";
    TVX_CHECK(!u.speaker_id.empty()) << "utterance " << u.utt_id
                                     << " has no speaker";
  }
  same_speaker_.resize(utts_->size());
  for (size_t i = 0; i < utts_->size(); ++i)
    for (size_t j = 0; j < utts_->size(); ++j)
      if (i != j && (*utts_)[i].speaker_id == (*utts_)[j].speaker_id)
        same_speaker_[i].push_back(int(j));
  for (size_t i = 0; i < utts_->size(); ++i)
    if (same_speaker_[i].empty())
      std::cerr << "warning: speaker " << (*utts_)[i].speaker_id
                << " has a single utterance; " << (*utts_)[i].utt_id
                << " will reference itself\n";
}

TrainSample Batcher::make_sample(int utt_index, uint64_t sample_seed) const {
  const TrainUtt& utt = (*utts_)[size_t(utt_index)];
  Rng rng(sample_seed);

  TrainSample s;
  s.utt_index = utt_index;
  s.variant = int(rng.uniform_int(utt.factors.size()));
  s.target_mel = utt.mels[size_t(s.variant)].frames;
  s.units = utt.units[size_t(s.variant)];

  // Speaker reference: another utterance of the same speaker, unperturbed.
  const auto& others = same_speaker_[size_t(utt_index)];
  const TrainUtt* ref = &utt;
  if (others.empty()) {
    s.speaker_ref_is_self = true;
  } else {
    ref = &(*utts_)[size_t(others[rng.uniform_int(others.size())])];
  }
  auto base_of = [](const TrainUtt& u) -> const dsp::MelSpectrogram& {
    for (size_t v = 0; v < u.factors.size(); ++v)
      if (u.factors[v] == 1.0) return u.mels[v];
    return u.mels.front();
  };

  // SpecAugment both style-encoder inputs on the fly; the target stays clean.
  dsp::AugmentSpec aug = augment_;
  aug.rng_seed = rng.next_u64();
  s.speaker_ref_mel = dsp::spec_augment(base_of(*ref), aug).frames;
  aug.rng_seed = rng.next_u64();
  s.prosody_mel = dsp::spec_augment(utt.mels[size_t(s.variant)], aug).frames;
  return s;
}

std::vector<std::vector<TrainSample>> Batcher::epoch(int epoch_index) const {
  const int n = utt_count();
  std::vector<int> order(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) order[size_t(i)] = i;
  Rng shuffle_rng(Rng::mix(seed_, 0xe90c4, uint64_t(epoch_index)));
  for (int i = n - 1; i > 0; --i)
    std::swap(order[size_t(i)],
              order[size_t(shuffle_rng.uniform_int(uint64_t(i) + 1))]);

  std::vector<std::vector<TrainSample>> batches;
  for (int start = 0; start < n; start += batch_size_) {
    std::vector<TrainSample> batch;
    for (int i = start; i < std::min(n, start + batch_size_); ++i) {
      const uint64_t sample_seed =
          Rng::mix(seed_, 0x5a3b1e, uint64_t(epoch_index), uint64_t(i));
      batch.push_back(make_sample(order[size_t(i)], sample_seed));
    }
    batches.push_back(std::move(batch));
  }
  return batches;
}

}  // namespace trivox::train
