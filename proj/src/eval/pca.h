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

#ifndef TRIVOX_EVAL_PCA_H_
#define TRIVOX_EVAL_PCA_H_

#include <vector>

#include "core/tensor.h"

namespace trivox::eval {

struct Pca1Result {
  std::vector<double> direction;   // unit-norm first principal component
  std::vector<double> projection;  // per-row score of the centered data
  double explained_variance = 0.0;
};

// First principal component of the rows of x, by deterministic power
// iteration on the covariance. Used to reduce frame-level activations to a
// single trace over time.
Pca1Result pca_project_1d(const TensorF& x, int max_iters = 200);

}  // namespace trivox::eval

#endif  // TRIVOX_EVAL_PCA_H_
