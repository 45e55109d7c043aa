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

#ifndef TRIVOX_MODEL_CHECKPOINT_H_
#define TRIVOX_MODEL_CHECKPOINT_H_

#include <array>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "model/reconstructor.h"

namespace trivox::model {

// Optimizer and loop state persisted next to the parameters so a resumed
// run continues bit-exactly.
struct TrainerState {
  uint64_t global_step = 0;
  std::array<uint64_t, 4> rng_state{};
  std::map<std::string, double> extras;  // best_val_mse, evals_since_best, ...
  bool has_optimizer = false;
  uint64_t adam_t = 0;
  std::vector<TensorF> adam_m, adam_v;  // aligned with params().all() order
};

// Versioned container: magic "PCKP", format version, serialized ModelConfig,
// named float32 parameter tensors, optional Adam state, global step and RNG
// state. Loading into an existing model rejects any config mismatch.
void save_checkpoint(const std::string& path, const Reconstructor<float>& m,
                     const TrainerState* state = nullptr);

std::unique_ptr<Reconstructor<float>> load_checkpoint(const std::string& path,
                                                      TrainerState* state = nullptr);

// Overwrites parameters of an existing model; throws if the stored config
// differs from m.cfg().
void load_params_into(const std::string& path, Reconstructor<float>& m);

}  // namespace trivox::model

#endif  // TRIVOX_MODEL_CHECKPOINT_H_
