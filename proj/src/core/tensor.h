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

#ifndef TRIVOX_CORE_TENSOR_H_
#define TRIVOX_CORE_TENSOR_H_

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <vector>

#include "core/check.h"

namespace trivox {

// Dense row-major tensor, rank 1 or 2. Everything in the model and the DSP
// stack is a matrix [rows x cols] or a vector; conv kernels are stored
// flattened. Value semantics throughout.
template <typename T>
struct Tensor {
  int rows = 0;
  int cols = 1;  // rank-1 tensors keep cols == 1
  std::vector<T> v;

  Tensor() = default;
  Tensor(int r, int c) : rows(r), cols(c), v(size_t(r) * size_t(c), T(0)) {
    TVX_CHECK(r >= 0 && c >= 0) << "bad tensor shape " << r << "x" << c;
  }
  explicit Tensor(int r) : Tensor(r, 1) {}

  int64_t size() const { return int64_t(rows) * cols; }
  bool empty() const { return size() == 0; }

  T* data() { return v.data(); }
  const T* data() const { return v.data(); }

  T& at(int r, int c) { return v[size_t(r) * cols + c]; }
  const T& at(int r, int c) const { return v[size_t(r) * cols + c]; }
  T& operator[](int64_t i) { return v[size_t(i)]; }
  const T& operator[](int64_t i) const { return v[size_t(i)]; }

  T* row(int r) { return v.data() + size_t(r) * cols; }
  const T* row(int r) const { return v.data() + size_t(r) * cols; }

  bool same_shape(const Tensor& o) const {
    return rows == o.rows && cols == o.cols;
  }

  void fill(T x) { std::fill(v.begin(), v.end(), x); }
  void zero() { fill(T(0)); }

  bool all_finite() const {
    for (const T& x : v)
      if (!std::isfinite(double(x))) return false;
    return true;
  }

  template <typename U>
  Tensor<U> cast() const {
    Tensor<U> out(rows, cols);
    for (int64_t i = 0; i < size(); ++i) out.v[size_t(i)] = U(v[size_t(i)]);
    return out;
  }
};

using TensorF = Tensor<float>;
using TensorD = Tensor<double>;

}  // namespace trivox

#endif  // TRIVOX_CORE_TENSOR_H_
