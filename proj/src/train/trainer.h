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

#ifndef TRIVOX_TRAIN_TRAINER_H_
#define TRIVOX_TRAIN_TRAINER_H_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "model/checkpoint.h"
#include "model/reconstructor.h"
#include "train/adam.h"
#include "train/batcher.h"
#include "train/schedule.h"

namespace trivox::train {

struct StepStats {
  double mse = 0.0;        // reconstruction MSE over the batch (no stop term)
  double grad_norm = 0.0;  // post-clip global norm
};

struct CurveRow {
  int64_t step = 0;
  double train_mse = 0.0;
  double val_mse = -1.0;  // < 0 when no eval happened this step
  double lr = 0.0;
  double grad_norm = 0.0;
};

// Single training writer around a model + Adam. Per-sample forwards run on
// worker threads; gradients merge in sample order so the loss curve is a
// pure function of (seed, data, config) at any thread count.
class Trainer {
 public:
  Trainer(model::Reconstructor<float>& m, const TrainConfig& cfg);

  // One clipped Adam update on a batch at the given global step.
  StepStats train_step(const std::vector<TrainSample>& batch, int64_t step);

  // Teacher-forced MSE over a validation set (deterministic).
  double validation_mse(const std::vector<TrainSample>& val) const;

  Adam& adam() { return adam_; }
  const std::vector<CurveRow>& curve() const { return curve_; }

  // Full pretraining loop: seeded validation holdout, warmup+cosine LR,
  // early stopping on validation MSE, best-checkpoint persistence, curve
  // CSV. Returns the step count executed. Writes <out_dir>/best.ckpt,
  // <out_dir>/last.ckpt and <out_dir>/curve.csv. stop_at_step interrupts
  // the run early without touching the LR horizon (resume picks it up).
  int64_t pretrain(const std::vector<TrainUtt>& utts,
                   const dsp::AugmentSpec& augment, const std::string& out_dir,
                   const std::string& resume_from = "", int64_t stop_at_step = 0);

  // Records used by tests: alignment entropy of a teacher-forced pass.
  double alignment_entropy(const TrainSample& s) const;

 private:
  void write_curve(const std::string& path) const;

  model::Reconstructor<float>& model_;
  TrainConfig cfg_;
  Adam adam_;
  Rng rng_;  // batch/sample seeding stream (serialized into checkpoints)
  std::vector<CurveRow> curve_;
};

// Splits utterances into (train, validation) with a seeded shuffle; the
// holdout has min(val_count, n-1) utterances.
std::pair<std::vector<TrainUtt>, std::vector<TrainUtt>> split_validation(
    const std::vector<TrainUtt>& utts, int val_count, uint64_t seed);

// Validation samples are built once, without augmentation.
std::vector<TrainSample> make_eval_samples(const std::vector<TrainUtt>& utts);

}  // namespace trivox::train

#endif  // TRIVOX_TRAIN_TRAINER_H_
