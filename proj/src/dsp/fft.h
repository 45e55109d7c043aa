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

#ifndef TRIVOX_DSP_FFT_H_
#define TRIVOX_DSP_FFT_H_

#include <complex>
#include <vector>

namespace trivox::dsp {

// In-place iterative radix-2 FFT, double precision. n must be a power of two.
// Inverse includes the 1/n scale. Self-contained so spectra are reproducible
// bit-for-bit across builds.
void fft(std::vector<std::complex<double>>& a, bool inverse);

bool is_power_of_two(int n);

}  // namespace trivox::dsp

#endif  // TRIVOX_DSP_FFT_H_
