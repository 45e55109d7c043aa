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

#ifndef TRIVOX_NN_PARAMS_H_
#define TRIVOX_NN_PARAMS_H_

#include <cmath>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "core/check.h"
#include "core/rng.h"
#include "core/tensor.h"
#include "nn/graph.h"

namespace trivox::nn {

template <typename T>
struct Param {
  std::string name;
  Tensor<T> value;
  bool trainable = true;
  double lr_scale = 1.0;  // per-group multiplier (SER head vs encoder)
};

// Named parameter registry. Registration order is fixed by construction
// order, which pins the initialization stream: the same seed always yields
// the same weights.
template <typename T>
class ParamStore {
 public:
  explicit ParamStore(uint64_t init_seed) : rng_(Rng::mix(init_seed, 0x1417)) {}

  // Uniform fan-in init: U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
  Param<T>* weight(const std::string& name, int rows, int cols, int fan_in) {
    auto* p = add(name, rows, cols);
    const double bound = 1.0 / std::sqrt(double(fan_in));
    for (auto& x : p->value.v) x = T(rng_.uniform(-bound, bound));
    return p;
  }

  Param<T>* zeros(const std::string& name, int rows, int cols = 1) {
    return add(name, rows, cols);
  }

  Param<T>* find(const std::string& name) const {
    auto it = by_name_.find(name);
    return it == by_name_.end() ? nullptr : it->second;
  }

  const std::vector<std::unique_ptr<Param<T>>>& all() const { return params_; }

  int64_t total_size() const {
    int64_t n = 0;
    for (const auto& p : params_) n += p->value.size();
    return n;
  }

  // Marks every parameter whose name starts with prefix.
  void set_trainable(const std::string& prefix, bool trainable) {
    for (auto& p : params_)
      if (p->name.rfind(prefix, 0) == 0) p->trainable = trainable;
  }

  void set_lr_scale(const std::string& prefix, double s) {
    for (auto& p : params_)
      if (p->name.rfind(prefix, 0) == 0) p->lr_scale = s;
  }

 private:
  Param<T>* add(const std::string& name, int rows, int cols) {
    TVX_CHECK(by_name_.count(name) == 0) << "duplicate parameter " << name;
    auto p = std::make_unique<Param<T>>();
    p->name = name;
    p->value = Tensor<T>(rows, cols);
    params_.push_back(std::move(p));
    by_name_[name] = params_.back().get();
    return params_.back().get();
  }

  Rng rng_;
  std::vector<std::unique_ptr<Param<T>>> params_;
  std::unordered_map<std::string, Param<T>*> by_name_;
};

// Per-graph cache of parameter leaves, so each parameter has exactly one
// node per graph and its gradient accumulates in one place.
template <typename T>
class Binder {
 public:
  explicit Binder(Graph<T>& g) : g_(g) {}

  Var<T> operator()(const Param<T>* p) {
    auto it = cache_.find(p);
    if (it != cache_.end()) return it->second;
    const Var<T> v = g_.leaf(&p->value, p->trainable);
    cache_.emplace(p, v);
    return v;
  }

  // Gradient of a bound parameter, or nullptr if it never joined the graph
  // or received no gradient.
  const Tensor<T>* grad_of(const Param<T>* p) {
    auto it = cache_.find(p);
    if (it == cache_.end()) return nullptr;
    if (!g_.has_grad(it->second)) return nullptr;
    return &g_.grad(it->second);
  }

 private:
  Graph<T>& g_;
  std::unordered_map<const Param<T>*, Var<T>> cache_;
};

// Everything a layer forward needs besides its input.
template <typename T>
struct Fwd {
  Graph<T>& g;
  Binder<T>& bind;
  Rng& rng;        // dropout / scheduled-sampling stream
  bool training;   // scheduled sampling only runs in training
};

}  // namespace trivox::nn

#endif  // TRIVOX_NN_PARAMS_H_
