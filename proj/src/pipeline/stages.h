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

#ifndef TRIVOX_PIPELINE_STAGES_H_
#define TRIVOX_PIPELINE_STAGES_H_

#include <string>
#include <vector>

#include "pipeline/config.h"
#include "pipeline/manifest.h"
#include "train/batcher.h"

namespace trivox::pipeline {

// Pipeline stages, each writing its artifacts under <run_dir>/<stage>/ with
// a provenance record {config hash, input hashes, seed, timestamp}. A rerun
// whose config and input hashes match the recorded provenance is a no-op.
extern const std::vector<std::string> kStages;

// Dependencies of a stage (names from kStages).
std::vector<std::string> stage_deps(const std::string& stage);

// Verifies the DAG is acyclic and complete (every dep is a known stage).
void check_stage_dag();

// Raised when an upstream stage has not produced its artifacts yet; the CLI
// maps it to exit code 2.
class MissingDependency : public Error {
 public:
  explicit MissingDependency(const std::string& msg) : Error(msg) {}
};

struct StageResult {
  bool skipped = false;  // true when provenance matched (up-to-date)
  std::string message;
};

StageResult run_stage(const std::string& stage, const PipelineConfig& cfg,
                      const std::string& manifest_path);

// Loads the training view (mels + refined units per speed variant) from the
// extract-features and quantize artifacts.
std::vector<train::TrainUtt> load_training_set(const PipelineConfig& cfg,
                                               const Manifest& manifest);

// Speed-variant naming: factor 1.0 keeps the plain utt id, others get a
// "sp<factor>-" prefix.
std::string variant_id(const std::string& utt_id, double factor);

}  // namespace trivox::pipeline

#endif  // TRIVOX_PIPELINE_STAGES_H_
