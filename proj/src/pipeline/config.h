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

#ifndef TRIVOX_PIPELINE_CONFIG_H_
#define TRIVOX_PIPELINE_CONFIG_H_

#include <cstdint>
#include <map>
#include <string>

#include "dsp/augment.h"
#include "dsp/mel.h"
#include "model/config.h"
#include "train/schedule.h"

namespace trivox::pipeline {

// Flat "section.key value" text config. Resolution order: defaults, then
// config file, then CLI flag overrides (last wins). The fully resolved
// config is archived with every run.
class KeyValues {
 public:
  static KeyValues from_file(const std::string& path);
  void merge_line(const std::string& line);  // "section.key value"
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const;
  std::string get_str(const std::string& key, const std::string& dflt) const;
  int64_t get_int(const std::string& key, int64_t dflt) const;
  double get_double(const std::string& key, double dflt) const;

  std::string serialize() const;  // sorted, one per line
  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

// Everything a run needs, resolved from KeyValues. Known keys are documented
// in the README; unknown keys are rejected to catch typos.
struct PipelineConfig {
  dsp::DspConfig dsp;
  dsp::AugmentSpec augment;
  model::ModelConfig model;  // after preset/scale resolution
  train::TrainConfig train;
  int unit_vocab_size = 32;          // units.vocab_size
  int kmeans_max_iters = 100;
  int64_t kmeans_subsample = 0;
  uint64_t kmeans_seed = 3;
  std::string feature_source = "mfcc";  // "mfcc" or "external"
  std::string external_features_dir;    // for feature_source = external
  int model_scale_divisor = 4;          // 1 = full size, 4 = desk preset
  uint64_t global_seed = 1;
  std::string run_dir = "runs/default";
  int griffin_lim_iters = 60;
  // EVC emotion-pair presets resolved by the convert stage.
  std::string evc_pairs = "neutral:angry,neutral:happy,neutral:sad";
  // SER harness settings.
  std::string ser_mode = "session";  // or "speaker"
  int ser_epochs = 10;
  double ser_encoder_lr = 1e-4;
  double ser_head_lr = 5e-4;
  int ser_batch_size = 8;
  uint64_t ser_cv_seed = 7;

  KeyValues resolved;  // archived verbatim

  static PipelineConfig resolve(const KeyValues& kv);
};

}  // namespace trivox::pipeline

#endif  // TRIVOX_PIPELINE_CONFIG_H_
