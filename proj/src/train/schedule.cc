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

#include "train/schedule.h"

#include <algorithm>
#include <cmath>

#include "core/check.h"

namespace trivox::train {

void TrainConfig::validate() const {
  TVX_CHECK(batch_size > 0) << "batch_size must be positive";
  TVX_CHECK(warmup_steps > 0) << "warmup_steps must be positive";
  TVX_CHECK(initial_lr > 0.0 && fixed_lr > 0.0) << "learning rates must be positive";
  TVX_CHECK(grad_clip > 0.0) << "grad_clip must be positive";
  TVX_CHECK(ss_start_prob >= ss_end_prob) << "scheduled sampling must not increase";
  TVX_CHECK(ss_start_prob <= 1.0 && ss_end_prob >= 0.0) << "bad sampling probs";
  TVX_CHECK(patience > 0 && min_delta >= 0.0) << "bad early-stopping settings";
  TVX_CHECK(max_steps > warmup_steps) << "max_steps must exceed warmup";
  TVX_CHECK(eval_every > 0 && val_count >= 1) << "bad eval settings";
  TVX_CHECK(stop_loss_weight >= 0.0) << "bad stop_loss_weight";
}

double lr_at(int64_t step, const TrainConfig& cfg) {
  TVX_CHECK(step >= 0) << "negative step";
  if (cfg.schedule == LrSchedule::kFixed) return cfg.fixed_lr;
  if (step <= cfg.warmup_steps)
    return cfg.initial_lr * double(step) / double(cfg.warmup_steps);
  if (step >= cfg.max_steps) return 0.0;
  const double progress =
      double(step - cfg.warmup_steps) / double(cfg.max_steps - cfg.warmup_steps);
  return cfg.initial_lr * 0.5 *
         (1.0 + std::cos(3.14159265358979323846 * progress));
}

double sampling_prob_at(int64_t step, const TrainConfig& cfg) {
  TVX_CHECK(step >= 0) << "negative step";
  const int span = std::max(cfg.ss_steps(), 1);
  const double frac = std::min(1.0, double(step) / double(span));
  return cfg.ss_start_prob - (cfg.ss_start_prob - cfg.ss_end_prob) * frac;
}

}  // namespace trivox::train
