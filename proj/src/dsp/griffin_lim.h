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

#ifndef TRIVOX_DSP_GRIFFIN_LIM_H_
#define TRIVOX_DSP_GRIFFIN_LIM_H_

#include "dsp/mel.h"
#include "dsp/signal.h"

namespace trivox::dsp {

// Iterative phase reconstruction from a log-mel spectrogram. The mel is
// mapped back to a linear magnitude spectrum with a regularized
// least-squares filterbank inverse, then phases are refined with
// momentum-accelerated projections. Audible-output plumbing, not a neural
// vocoder; quality is not contractual.
Waveform invert_mel(const MelSpectrogram& m, int n_iters, const DspConfig& cfg);

}  // namespace trivox::dsp

#endif  // TRIVOX_DSP_GRIFFIN_LIM_H_
