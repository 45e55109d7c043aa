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

#include "train/adam.h"

#include <cmath>

#include "core/check.h"

namespace trivox::train {

Adam::Adam(nn::ParamStore<float>& params, double beta1, double beta2, double eps)
    : params_(params), beta1_(beta1), beta2_(beta2), eps_(eps) {
  for (const auto& p : params_.all()) {
    m_.emplace_back(p->value.rows, p->value.cols);
    v_.emplace_back(p->value.rows, p->value.cols);
  }
}

void Adam::restore(uint64_t t, std::vector<TensorF> m, std::vector<TensorF> v) {
  TVX_CHECK(m.size() == m_.size() && v.size() == v_.size())
      << "optimizer state size mismatch";
  t_ = t;
  m_ = std::move(m);
  v_ = std::move(v);
}

double Adam::step(const std::vector<const TensorF*>& grads, double lr,
                  double clip) {
  const auto& params = params_.all();
  TVX_CHECK(grads.size() == params.size()) << "gradient list size mismatch";

  double sq = 0.0;
  for (size_t i = 0; i < params.size(); ++i) {
    if (grads[i] == nullptr || !params[i]->trainable) continue;
    for (float g : grads[i]->v) {
      TVX_CHECK(std::isfinite(g)) << "non-finite gradient in " << params[i]->name;
      sq += double(g) * double(g);
    }
  }
  const double norm = std::sqrt(sq);
  const double scale = norm > clip ? clip / norm : 1.0;

  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, double(t_));
  const double bc2 = 1.0 - std::pow(beta2_, double(t_));
  for (size_t i = 0; i < params.size(); ++i) {
    if (grads[i] == nullptr || !params[i]->trainable) continue;
    const double rate = lr * params[i]->lr_scale;
    TensorF& p = params[i]->value;
    TensorF& m = m_[i];
    TensorF& v = v_[i];
    const TensorF& g = *grads[i];
    for (int64_t j = 0; j < p.size(); ++j) {
      const double gj = double(g[j]) * scale;
      m[j] = float(beta1_ * double(m[j]) + (1.0 - beta1_) * gj);
      v[j] = float(beta2_ * double(v[j]) + (1.0 - beta2_) * gj * gj);
      const double mhat = double(m[j]) / bc1;
      const double vhat = double(v[j]) / bc2;
      p[j] = float(double(p[j]) - rate * mhat / (std::sqrt(vhat) + eps_));
    }
  }
  return norm * scale;
}

}  // namespace trivox::train
