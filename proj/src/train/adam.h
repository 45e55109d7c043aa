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

#ifndef TRIVOX_TRAIN_ADAM_H_
#define TRIVOX_TRAIN_ADAM_H_

#include <cstdint>
#include <vector>

#include "nn/params.h"

namespace trivox::train {

// Adam with beta = (0.9, 0.999), eps = 1e-8 and global-norm gradient
// clipping. Frozen parameters are skipped entirely; per-parameter lr_scale
// implements the two-group fine-tuning rates.
class Adam {
 public:
  explicit Adam(nn::ParamStore<float>& params, double beta1 = 0.9,
                double beta2 = 0.999, double eps = 1e-8);

  // grads is aligned with params.all(); null entries mean "no gradient this
  // step". Clips to global norm <= clip, applies the update at rate lr and
  // returns the post-clip global norm.
  double step(const std::vector<const TensorF*>& grads, double lr, double clip);

  uint64_t t() const { return t_; }
  std::vector<TensorF>& m() { return m_; }
  std::vector<TensorF>& v() { return v_; }
  void restore(uint64_t t, std::vector<TensorF> m, std::vector<TensorF> v);

 private:
  nn::ParamStore<float>& params_;
  double beta1_, beta2_, eps_;
  uint64_t t_ = 0;
  std::vector<TensorF> m_, v_;
};

}  // namespace trivox::train

#endif  // TRIVOX_TRAIN_ADAM_H_
