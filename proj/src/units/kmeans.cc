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

#include "units/kmeans.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "core/binio.h"
#include "core/check.h"
#include "core/rng.h"

namespace trivox::units {

namespace {

double sq_dist(const float* a, const float* b, int d) {
  double s = 0.0;
#pragma omp simd reduction(+ : s)
  for (int i = 0; i < d; ++i) {
    const double diff = double(a[i]) - double(b[i]);
    s += diff * diff;
  }
  return s;
}

// Nearest centroid of x; ties break toward the lowest index.
int nearest(const float* x, const TensorF& centroids, double* dist_out) {
  int best = 0;
  double best_d = sq_dist(x, centroids.row(0), centroids.cols);
  for (int c = 1; c < centroids.rows; ++c) {
    const double d = sq_dist(x, centroids.row(c), centroids.cols);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (dist_out != nullptr) *dist_out = best_d;
  return best;
}

}  // namespace

Codebook train_codebook(const std::vector<FrameFeatures>& features, int n_clusters,
                        uint64_t seed, const KmeansOptions& opts) {
  TVX_CHECK(n_clusters >= 1) << "need at least one cluster";
  TVX_CHECK(!features.empty()) << "no feature matrices given";
  const int dim = features.front().dim();
  int64_t total = 0;
  for (const auto& f : features) {
    TVX_CHECK(f.dim() == dim) << "inconsistent feature dims: " << f.dim()
                              << " vs " << dim << " (utt " << f.utt_id << ")";
    total += f.length();
  }
  TVX_CHECK(total >= n_clusters) << "fewer frames (" << total
                                 << ") than clusters (" << n_clusters << ")";

  // Flatten (optionally subsampled) training frames.
  TensorF pts;
  if (opts.subsample > 0 && opts.subsample < total) {
    Rng sub(Rng::mix(opts.subsample_seed, 0x5b5a11));
    // Uniform sample of frame indices without replacement via partial
    // Fisher-Yates on the index space.
    std::vector<int64_t> idx(static_cast<size_t>(total));
    for (int64_t i = 0; i < total; ++i) idx[size_t(i)] = i;
    for (int64_t i = 0; i < opts.subsample; ++i) {
      const auto j = i + int64_t(sub.uniform_int(uint64_t(total - i)));
      std::swap(idx[size_t(i)], idx[size_t(j)]);
    }
    idx.resize(size_t(std::max<int64_t>(opts.subsample, n_clusters)));
    std::sort(idx.begin(), idx.end());
    pts = TensorF(int(idx.size()), dim);
    int64_t row = 0, cursor = 0;
    size_t which = 0;
    for (const auto& f : features) {
      for (int r = 0; r < f.length(); ++r, ++cursor) {
        if (which < idx.size() && idx[which] == cursor) {
          std::copy(f.mat.row(r), f.mat.row(r) + dim, pts.row(int(row)));
          ++row;
          ++which;
        }
      }
    }
  } else {
    pts = TensorF(int(total), dim);
    int64_t row = 0;
    for (const auto& f : features) {
      std::copy(f.mat.v.begin(), f.mat.v.end(), pts.row(int(row)));
      row += f.length();
    }
  }
  const int n = pts.rows;

  Codebook cb;
  cb.centroids = TensorF(n_clusters, dim);
  cb.train_seed = seed;
  Rng rng(Rng::mix(seed, 0x6b6d));

  // k-means++ seeding.
  std::vector<double> min_d(size_t(n), 0.0);
  {
    const int first = int(rng.uniform_int(uint64_t(n)));
    std::copy(pts.row(first), pts.row(first) + dim, cb.centroids.row(0));
    for (int i = 0; i < n; ++i)
      min_d[size_t(i)] = sq_dist(pts.row(i), cb.centroids.row(0), dim);
    for (int c = 1; c < n_clusters; ++c) {
      double sum = 0.0;
      for (double d : min_d) sum += d;
      int pick;
      if (sum <= 0.0) {
        pick = int(rng.uniform_int(uint64_t(n)));
      } else {
        const double r = rng.uniform() * sum;
        double acc = 0.0;
        pick = n - 1;
        for (int i = 0; i < n; ++i) {
          acc += min_d[size_t(i)];
          if (acc >= r) {
            pick = i;
            break;
          }
        }
      }
      std::copy(pts.row(pick), pts.row(pick) + dim, cb.centroids.row(c));
      for (int i = 0; i < n; ++i)
        min_d[size_t(i)] =
            std::min(min_d[size_t(i)], sq_dist(pts.row(i), cb.centroids.row(c), dim));
    }
  }

  std::vector<int> assign(size_t(n), 0);
  std::vector<double> pt_dist(size_t(n), 0.0);
  std::vector<int64_t> counts(size_t(n_clusters), 0);
  TensorD sums(n_clusters, dim);
  double prev_inertia = -1.0;
  std::vector<double> history;

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    // Assignment; each point independent, so this parallelizes without
    // changing any result.
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i)
      assign[size_t(i)] = nearest(pts.row(i), cb.centroids, &pt_dist[size_t(i)]);

    double inertia = 0.0;
    for (int i = 0; i < n; ++i) inertia += pt_dist[size_t(i)];
    if (!history.empty())
      TVX_CHECK(inertia <= history.back() * (1.0 + 1e-12) + 1e-12)
          << "inertia increased: " << history.back() << " -> " << inertia;
    history.push_back(inertia);

    // Update step: accumulate in a fixed point order.
    sums.zero();
    std::fill(counts.begin(), counts.end(), 0);
    for (int i = 0; i < n; ++i) {
      const int c = assign[size_t(i)];
      ++counts[size_t(c)];
      const float* p = pts.row(i);
      double* s = sums.row(c);
      for (int d = 0; d < dim; ++d) s[d] += double(p[d]);
    }
    // Dead clusters grab the point farthest from its assigned centroid.
    std::vector<char> stolen(size_t(n), 0);
    for (int c = 0; c < n_clusters; ++c) {
      if (counts[size_t(c)] > 0) continue;
      int far = -1;
      double far_d = -1.0;
      for (int i = 0; i < n; ++i)
        if (!stolen[size_t(i)] && pt_dist[size_t(i)] > far_d) {
          far_d = pt_dist[size_t(i)];
          far = i;
        }
      TVX_CHECK(far >= 0) << "cannot repair empty cluster";
      stolen[size_t(far)] = 1;
      std::copy(pts.row(far), pts.row(far) + dim, cb.centroids.row(c));
    }
    for (int c = 0; c < n_clusters; ++c) {
      if (counts[size_t(c)] == 0) continue;
      const double inv = 1.0 / double(counts[size_t(c)]);
      float* out = cb.centroids.row(c);
      const double* s = sums.row(c);
      for (int d = 0; d < dim; ++d) out[d] = float(s[d] * inv);
    }

    if (prev_inertia >= 0.0) {
      const double rel = (prev_inertia - inertia) / std::max(prev_inertia, 1e-30);
      if (rel < opts.rel_tol && rel >= 0.0) break;
    }
    prev_inertia = inertia;
  }

  // Final inertia against the converged centroids.
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i)
    nearest(pts.row(i), cb.centroids, &pt_dist[size_t(i)]);
  cb.inertia = 0.0;
  for (int i = 0; i < n; ++i) cb.inertia += pt_dist[size_t(i)];
  if (!history.empty()) cb.inertia = std::min(cb.inertia, history.back());
  cb.inertia_history = std::move(history);
  return cb;
}

UnitSequence quantize(const FrameFeatures& f, const Codebook& c) {
  TVX_CHECK(f.dim() == c.dim())
      << "feature dim " << f.dim() << " does not match codebook dim " << c.dim()
      << " (utt " << f.utt_id << ")";
  TVX_CHECK(f.length() >= 1) << "empty feature matrix (utt " << f.utt_id << ")";
  UnitSequence u;
  u.utt_id = f.utt_id;
  u.vocab_size = c.vocab_size();
  u.ids.resize(size_t(f.length()));
#pragma omp parallel for schedule(static)
  for (int i = 0; i < f.length(); ++i)
    u.ids[size_t(i)] = nearest(f.mat.row(i), c.centroids, nullptr);
  return u;
}

RefinedUnits refine(const UnitSequence& u) {
  RefinedUnits r;
  r.utt_id = u.utt_id;
  r.vocab_size = u.vocab_size;
  r.ids.reserve(u.ids.size());
  for (int id : u.ids)
    if (r.ids.empty() || r.ids.back() != id) r.ids.push_back(id);
  return r;
}

void save_codebook(const std::string& path, const Codebook& c) {
  auto os = binio::open_out(path);
  binio::write_magic(os, "PKMC");
  binio::write_pod<uint32_t>(os, uint32_t(c.vocab_size()));
  binio::write_pod<uint32_t>(os, uint32_t(c.dim()));
  binio::write_pod<uint64_t>(os, c.train_seed);
  binio::write_array(os, c.centroids.data(), size_t(c.centroids.size()));
}

Codebook load_codebook(const std::string& path) {
  auto is = binio::open_in(path);
  binio::expect_magic(is, "PKMC", path);
  const auto n = binio::read_pod<uint32_t>(is, "vocab size");
  const auto d = binio::read_pod<uint32_t>(is, "feature dim");
  Codebook c;
  c.train_seed = binio::read_pod<uint64_t>(is, "seed");
  c.centroids = TensorF(int(n), int(d));
  binio::read_array(is, c.centroids.data(), size_t(c.centroids.size()), path.c_str());
  return c;
}

void save_units(const std::string& path,
                const std::vector<std::pair<std::string, std::vector<int>>>& rows) {
  std::ofstream os(path);
  TVX_CHECK(os.good()) << "cannot open for writing: " << path;
  for (const auto& [utt, ids] : rows) {
    os << utt << "|";
    for (size_t i = 0; i < ids.size(); ++i) os << (i ? " " : "") << ids[i];
    os << "\n";
  }
}

std::vector<std::pair<std::string, std::vector<int>>> load_units(
    const std::string& path) {
  std::ifstream is(path);
  TVX_CHECK(is.good()) << "cannot open for reading: " << path;
  std::vector<std::pair<std::string, std::vector<int>>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto bar = line.find('|');
    TVX_CHECK(bar != std::string::npos)
        << path << ":" << lineno << ": missing '|' separator";
    std::istringstream ids_in(line.substr(bar + 1));
    std::vector<int> ids;
    int v;
    while (ids_in >> v) ids.push_back(v);
    rows.emplace_back(line.substr(0, bar), std::move(ids));
  }
  return rows;
}

}  // namespace trivox::units
