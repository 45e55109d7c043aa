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

#ifndef TRIVOX_TESTS_GRADCHECK_H_
#define TRIVOX_TESTS_GRADCHECK_H_

#include <cmath>
#include <functional>
#include <vector>

#include "nn/graph.h"

namespace trivox::testing {

// Central finite differences against the tape gradients, double precision.
// The builder must be a pure function of the leaf values (reseed any RNG it
// uses internally on every call). Returns the max relative error.
inline double gradcheck(
    std::vector<Tensor<double>> inputs,
    const std::function<nn::Var<double>(nn::Graph<double>&,
                                        const std::vector<nn::Var<double>>&)>&
        build,
    double h = 1e-6) {
  auto eval = [&](const std::vector<Tensor<double>>& vals) {
    nn::Graph<double> g(false);
    std::vector<nn::Var<double>> leaves;
    for (const auto& t : vals) leaves.push_back(g.leaf(&t, false));
    return g.val(build(g, leaves))[0];
  };

  // Analytic gradients.
  nn::Graph<double> g(true);
  std::vector<nn::Var<double>> leaves;
  for (const auto& t : inputs) leaves.push_back(g.leaf(&t, true));
  nn::Var<double> loss = build(g, leaves);
  g.backward(loss);

  double max_rel = 0.0;
  for (size_t i = 0; i < inputs.size(); ++i) {
    for (int64_t j = 0; j < inputs[i].size(); ++j) {
      auto plus = inputs;
      auto minus = inputs;
      plus[i][j] += h;
      minus[i][j] -= h;
      const double num = (eval(plus) - eval(minus)) / (2.0 * h);
      const double ana = g.has_grad(leaves[i]) ? double(g.grad(leaves[i])[j]) : 0.0;
      const double rel =
          std::abs(num - ana) / std::max({std::abs(num), std::abs(ana), 1e-8});
      max_rel = std::max(max_rel, rel);
    }
  }
  return max_rel;
}

inline Tensor<double> random_input(int r, int c, uint64_t seed, double lo = -1.0,
                                   double hi = 1.0) {
  Tensor<double> t(r, c);
  Rng rng(seed);
  for (auto& x : t.v) x = rng.uniform(lo, hi);
  return t;
}

}  // namespace trivox::testing

#endif  // TRIVOX_TESTS_GRADCHECK_H_
