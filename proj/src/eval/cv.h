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

#ifndef TRIVOX_EVAL_CV_H_
#define TRIVOX_EVAL_CV_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pipeline/manifest.h"

namespace trivox::eval {

// Four-way emotion label set; raw "excited" merges into happy, any other
// raw label is excluded from SER.
enum class EmotionLabel { kAngry = 0, kSad = 1, kHappy = 2, kNeutral = 3 };
constexpr int kNumEmotions = 4;

std::optional<EmotionLabel> map_raw_label(const std::string& raw);
std::string emotion_name(EmotionLabel e);

enum class CvMode { kLeaveOneSessionOut, kLeaveOneSpeakerOut };

struct CvFold {
  std::vector<std::string> train_ids, val_ids, test_ids;
};

struct CVPlan {
  CvMode mode = CvMode::kLeaveOneSessionOut;
  std::vector<CvFold> folds;
  uint64_t val_pick_seed = 0;  // recorded for reproducibility
};

// Session mode: one fold per session; test = the session, val = a random
// other session (seeded), train = the rest. Speaker mode: one fold per
// speaker; test = the speaker, val = the other speaker of the same session,
// train = all other sessions. Only rows with a mappable emotion label
// participate.
CVPlan build_cv_plan(const pipeline::Manifest& manifest, CvMode mode,
                     uint64_t seed = 7);

// Partition sanity: test sets disjoint, union covers every eligible
// utterance, per-fold val/test disjoint, zero session/speaker leakage.
void check_cv_plan(const CVPlan& plan, const pipeline::Manifest& manifest);

}  // namespace trivox::eval

#endif  // TRIVOX_EVAL_CV_H_
