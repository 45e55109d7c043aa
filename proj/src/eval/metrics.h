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

#ifndef TRIVOX_EVAL_METRICS_H_
#define TRIVOX_EVAL_METRICS_H_

#include <string>
#include <vector>

#include "core/tensor.h"
#include "dsp/mel.h"

namespace trivox::eval {

// Weighted accuracy: correct predictions over all utterances.
double compute_wa(const std::vector<int>& preds, const std::vector<int>& labels);

// Unweighted accuracy: mean over classes of per-class accuracy. Throws if a
// class in [0, n_classes) has no instance in labels.
double compute_ua(const std::vector<int>& preds, const std::vector<int>& labels,
                  int n_classes);

// Confusion matrix [n_classes x n_classes], rows = actual, cols = predicted.
Tensor<int64_t> confusion_matrix(const std::vector<int>& preds,
                                 const std::vector<int>& labels, int n_classes);

// Mel-cepstral distortion in dB, averaged frame-by-frame over the first
// min(len) frames: per frame (10/ln10) * sqrt(2 * sum_i (t_i - c_i)^2).
double mcd_db(const dsp::MelCepstra& target, const dsp::MelCepstra& converted);

// Root-mean-squared F0 error in Hz over the first min(len) frames; unvoiced
// frames participate with F0 = 0.
double f0_rmse_hz(const dsp::PitchTrack& target, const dsp::PitchTrack& converted);

}  // namespace trivox::eval

#endif  // TRIVOX_EVAL_METRICS_H_
