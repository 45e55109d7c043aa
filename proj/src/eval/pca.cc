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

#include "eval/pca.h"

#include <cmath>

#include "core/check.h"

namespace trivox::eval {

Pca1Result pca_project_1d(const TensorF& x, int max_iters) {
  TVX_CHECK(x.rows >= 2 && x.cols >= 1) << "pca needs at least two rows";
  const int n = x.rows, d = x.cols;
  std::vector<double> mean(size_t(d), 0.0);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < d; ++c) mean[size_t(c)] += double(x.at(r, c));
  for (auto& m : mean) m /= double(n);

  // Centered data, kept explicit: n and d stay small here.
  std::vector<double> cen(size_t(n) * size_t(d));
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < d; ++c)
      cen[size_t(r) * size_t(d) + size_t(c)] = double(x.at(r, c)) - mean[size_t(c)];

  // Power iteration with a deterministic start (first centered row, or a
  // basis vector if that row is zero).
  std::vector<double> v(size_t(d), 0.0);
  double norm = 0.0;
  for (int c = 0; c < d; ++c) {
    v[size_t(c)] = cen[size_t(c)];
    norm += v[size_t(c)] * v[size_t(c)];
  }
  if (norm < 1e-20) v[0] = 1.0;
  auto normalize = [&](std::vector<double>& u) {
    double s = 0.0;
    for (double a : u) s += a * a;
    s = std::sqrt(s);
    if (s < 1e-30) {
      u.assign(u.size(), 0.0);
      u[0] = 1.0;
      return;
    }
    for (double& a : u) a /= s;
  };
  normalize(v);

  std::vector<double> scores(static_cast<size_t>(n)), next(static_cast<size_t>(d));
  for (int it = 0; it < max_iters; ++it) {
    // next = C^T (C v), avoiding the d x d covariance.
    for (int r = 0; r < n; ++r) {
      double s = 0.0;
      for (int c = 0; c < d; ++c) s += cen[size_t(r) * size_t(d) + size_t(c)] * v[size_t(c)];
      scores[size_t(r)] = s;
    }
    std::fill(next.begin(), next.end(), 0.0);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < d; ++c)
        next[size_t(c)] += cen[size_t(r) * size_t(d) + size_t(c)] * scores[size_t(r)];
    normalize(next);
    v = next;
  }

  Pca1Result res;
  res.direction = v;
  res.projection.resize(size_t(n));
  double var = 0.0;
  for (int r = 0; r < n; ++r) {
    double s = 0.0;
    for (int c = 0; c < d; ++c) s += cen[size_t(r) * size_t(d) + size_t(c)] * v[size_t(c)];
    res.projection[size_t(r)] = s;
    var += s * s;
  }
  res.explained_variance = var / double(n);
  return res;
}

}  // namespace trivox::eval
