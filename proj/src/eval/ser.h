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

#ifndef TRIVOX_EVAL_SER_H_
#define TRIVOX_EVAL_SER_H_

#include <map>
#include <string>
#include <vector>

#include "dsp/mel.h"
#include "eval/cv.h"
#include "eval/metrics.h"
#include "model/config.h"

namespace trivox::eval {

struct EvalReport {
  int n_classes = 0;
  std::vector<std::string> class_names;
  std::vector<double> fold_wa, fold_ua;
  double wa = 0.0, ua = 0.0;  // pooled (utterance-weighted) over folds
  double fold_mean_wa = 0.0, fold_mean_ua = 0.0;
  Tensor<int64_t> confusion;  // pooled; rows = actual, cols = predicted
  int64_t n_utterances = 0;

  // Keys in a fixed, documented order.
  std::string to_text() const;
  void write_confusion_csv(const std::string& path) const;
};

// Pools per-fold predictions into one report (both pooled and fold-averaged
// numbers are emitted).
EvalReport assemble_report(
    const std::vector<std::vector<int>>& fold_preds,
    const std::vector<std::vector<int>>& fold_labels, int n_classes,
    const std::vector<std::string>& class_names);

struct HeadConfig {
  double encoder_lr = 1e-4;  // 0 freezes the encoder (head-only probes)
  double head_lr = 5e-4;
  int epochs = 30;
  int batch_size = 8;
  uint64_t seed = 5;
};

struct SerDataset {
  std::map<std::string, dsp::MelSpectrogram> mels;
  std::map<std::string, EmotionLabel> labels;
};

// Reads every manifest row with a mappable label and computes its mel.
SerDataset build_ser_dataset(const pipeline::Manifest& manifest,
                             const dsp::DspConfig& dsp_cfg);

// Fine-tunes the checkpoint's prosody encoder with one FC classification
// head per fold (encoder at encoder_lr, head at head_lr, best epoch by
// validation WA), then reports test WA/UA.
EvalReport finetune_ser(const std::string& checkpoint_path,
                        const SerDataset& data, const CVPlan& plan,
                        const HeadConfig& cfg);

// Head-only classification on the concatenation of the frozen prosody
// embedding with an externally supplied per-utterance representation
// ("utt_id|floats" rows). Missing utterance ids are a structured error.
EvalReport fuse_and_classify(const std::string& checkpoint_path,
                             const SerDataset& data,
                             const std::string& external_rep_file,
                             const CVPlan& plan, const HeadConfig& cfg);

// Speaker-information probe: frozen prosody encoder, FC head trained on a
// seeded 9:1 utterance split; returns test accuracy.
double probe_speaker(const std::string& checkpoint_path,
                     const std::map<std::string, dsp::MelSpectrogram>& mels,
                     const std::map<std::string, std::string>& speaker_of,
                     const HeadConfig& cfg);

// Loads "utt_id|space-separated floats" rows.
std::map<std::string, std::vector<float>> load_external_reps(
    const std::string& path);

struct UnitClassifierConfig {
  int vocab_size = 0;
  int embed_dim = 32;
  model::ModelConfig encoder_cfg;  // n_mel is overridden with embed_dim
  int n_classes = 2;
  std::vector<std::string> class_names;
  bool expect_deduplicated = false;  // asserts no adjacent repeats
  double lr = 1e-3;
  int epochs = 20;
  int batch_size = 8;
  uint64_t seed = 11;
};

// Trains the encoder topology on embedded token sequences (the
// duplicated-vs-deduplicated unit ablation) and reports WA per plan fold.
EvalReport classify_units(
    const std::map<std::string, std::vector<int>>& sequences,
    const std::map<std::string, int>& labels, const CVPlan& plan,
    const UnitClassifierConfig& cfg);

}  // namespace trivox::eval

#endif  // TRIVOX_EVAL_SER_H_
