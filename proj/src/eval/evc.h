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

#ifndef TRIVOX_EVAL_EVC_H_
#define TRIVOX_EVAL_EVC_H_

#include <map>
#include <string>
#include <vector>

#include "dsp/mel.h"
#include "model/reconstructor.h"
#include "train/schedule.h"

namespace trivox::eval {

// Conversion swaps the prosody reference: units and speaker come from the
// source speaker, style comes from the reference utterance.
struct ConversionRequest {
  std::string source_utt;
  std::string prosody_ref_utt;
  std::string speaker_ref_utt;  // empty: another utterance of the source speaker
};

struct ConversionResult {
  dsp::MelSpectrogram converted_mel;
  TensorF alignments;  // [T_out x L]
  bool truncated = false;
};

// Free-running conversion; deterministic for fixed inputs.
ConversionResult convert(const model::Reconstructor<float>& m,
                         const std::vector<int>& source_units,
                         const TensorF& speaker_ref_mel,
                         const TensorF& prosody_ref_mel,
                         const dsp::DspConfig& dsp_cfg);

// Lookup tables the conversion CLI resolves requests against.
struct ConversionData {
  std::map<std::string, TensorF> mels;              // utt -> content mel
  std::map<std::string, std::vector<int>> units;    // utt -> refined units
  std::map<std::string, std::string> speaker_of;    // utt -> speaker id
};

ConversionResult convert_request(const model::Reconstructor<float>& m,
                                 const ConversionRequest& req,
                                 const ConversionData& data,
                                 const dsp::DspConfig& dsp_cfg);

// EVC fine-tuning config: the same MSE objective at a fixed LR of 1e-5.
train::TrainConfig evc_finetune_config(train::TrainConfig base);

// Dumps per-utterance prosody/speaker embeddings ("utt|floats" text,
// bit-exact round trip), per-frame pre-pooling activations (PFEA files),
// per-utterance 1-D PCA traces over time, and time-mean unit embeddings.
void export_embeddings(const model::Reconstructor<float>& m,
                       const std::map<std::string, TensorF>& mels,
                       const std::map<std::string, std::vector<int>>& units,
                       const std::string& out_dir);

// Text embedding files used above.
void write_embedding_file(const std::string& path,
                          const std::map<std::string, std::vector<float>>& rows);
std::map<std::string, std::vector<float>> read_embedding_file(
    const std::string& path);

}  // namespace trivox::eval

#endif  // TRIVOX_EVAL_EVC_H_
