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

#ifndef TRIVOX_UNITS_KMEANS_H_
#define TRIVOX_UNITS_KMEANS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "core/tensor.h"
#include "units/features.h"

namespace trivox::units {

struct Codebook {
  TensorF centroids;  // [N x D]
  uint64_t train_seed = 0;
  double inertia = 0.0;  // final sum of squared distances on training frames
  std::vector<double> inertia_history;  // per Lloyd iteration; not persisted

  int vocab_size() const { return centroids.rows; }
  int dim() const { return centroids.cols; }
};

struct KmeansOptions {
  int max_iters = 100;
  double rel_tol = 1e-6;      // stop when inertia improves less than this
  int64_t subsample = 0;      // 0 = use all frames, else uniform sample size
  uint64_t subsample_seed = 17;
};

// Lloyd's algorithm with k-means++ initialization. Deterministic given the
// seed; per-iteration inertia is non-increasing (checked). Dead clusters are
// re-seeded at the point farthest from its assigned centroid.
Codebook train_codebook(const std::vector<FrameFeatures>& features, int n_clusters,
                        uint64_t seed, const KmeansOptions& opts = {});

struct UnitSequence {
  std::vector<int> ids;
  std::string utt_id;
  int vocab_size = 0;
};

struct RefinedUnits {
  std::vector<int> ids;  // no two adjacent ids equal
  std::string utt_id;
  int vocab_size = 0;
};

// Nearest centroid by Euclidean distance; ties break toward the lowest
// centroid index.
UnitSequence quantize(const FrameFeatures& f, const Codebook& c);

// Collapses adjacent duplicates, e.g. "23 23 23 2 2 ... 57" -> "23 2 ... 57".
// Idempotent; order preserved.
RefinedUnits refine(const UnitSequence& u);

// Codebook file: {magic "PKMC", u32 N, u32 D, u64 seed} + float32 centroids.
void save_codebook(const std::string& path, const Codebook& c);
Codebook load_codebook(const std::string& path);

// Unit files: one utterance per line, "<utt_id>|<space-separated ids>".
void save_units(const std::string& path,
                const std::vector<std::pair<std::string, std::vector<int>>>& rows);
std::vector<std::pair<std::string, std::vector<int>>> load_units(
    const std::string& path);

}  // namespace trivox::units

#endif  // TRIVOX_UNITS_KMEANS_H_
