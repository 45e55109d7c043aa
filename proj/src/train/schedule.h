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

#ifndef TRIVOX_TRAIN_SCHEDULE_H_
#define TRIVOX_TRAIN_SCHEDULE_H_

#include <cstdint>

namespace trivox::train {

enum class LrSchedule { kWarmupCosine, kFixed };

// Pretraining recipe. Paper-scale values in comments where the desk
// defaults differ.
struct TrainConfig {
  int batch_size = 4;      // 30 at full scale
  int warmup_steps = 50;   // 3000 at full scale
  double initial_lr = 1e-3;
  LrSchedule schedule = LrSchedule::kWarmupCosine;
  double fixed_lr = 1e-5;  // used by the kFixed schedule (EVC fine-tuning)
  double grad_clip = 1.0;
  double ss_start_prob = 1.0;  // scheduled sampling: linear decay
  double ss_end_prob = 0.7;
  int ss_decay_steps = 0;  // 0 -> max_steps / 2
  int patience = 10;       // validation evals without improvement
  double min_delta = 1e-4;
  uint64_t seed = 1;
  int max_steps = 2000;
  int eval_every = 100;
  int val_count = 2;  // 500 at full scale; desk corpora are tiny
  double stop_loss_weight = 0.5;
  double stop_pos_weight = 10.0;  // rebalances the single positive stop frame

  void validate() const;
  int ss_steps() const { return ss_decay_steps > 0 ? ss_decay_steps : max_steps / 2; }
};

// Linear warmup 0 -> initial_lr over warmup_steps, then cosine decay to 0
// at max_steps. The kFixed schedule returns fixed_lr everywhere.
double lr_at(int64_t step, const TrainConfig& cfg);

// Probability of feeding the ground-truth previous frame; monotone
// non-increasing from ss_start_prob to ss_end_prob.
double sampling_prob_at(int64_t step, const TrainConfig& cfg);

}  // namespace trivox::train

#endif  // TRIVOX_TRAIN_SCHEDULE_H_
