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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "core/rng.h"
#include "dsp/mel.h"
#include "pipeline/toy_corpus.h"
#include "units/features.h"
#include "units/kmeans.h"

using namespace trivox;
using units::Codebook;
using units::FrameFeatures;

namespace {
FrameFeatures random_features(int L, int D, uint64_t seed) {
  FrameFeatures f;
  f.mat = TensorF(L, D);
  f.utt_id = "rnd" + std::to_string(seed);
  Rng rng(seed);
  for (auto& x : f.mat.v) x = float(rng.uniform(-1.0, 1.0));
  return f;
}
}  // namespace

TEST_CASE("feature files: round trip and corruption detection") {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "trivox_units_test";
  fs::create_directories(dir);
  const auto f = random_features(10, 768, 5);
  const std::string path = (dir / "u1.pfea").string();
  units::save_features(path, f);
  const auto r = units::load_external_features(path, "u1");
  CHECK(r.length() == 10);
  CHECK(r.dim() == 768);
  CHECK(r.mat.v == f.mat.v);
  CHECK(r.source == units::FeatureSource::kExternalSsl);

  // Truncated file: drop the last 100 bytes.
  const std::string cut = (dir / "cut.pfea").string();
  {
    std::ifstream is(path, std::ios::binary);
    std::vector<char> bytes((std::istreambuf_iterator<char>(is)),
                            std::istreambuf_iterator<char>());
    std::ofstream os(cut, std::ios::binary);
    os.write(bytes.data(), std::streamsize(bytes.size()) - 100);
  }
  CHECK_THROWS_AS(units::load_external_features(cut, "cut"), Error);
}

TEST_CASE("mfcc fallback: shared frame grid and oracle") {
  dsp::DspConfig cfg;
  pipeline::ToyCorpusSpec spec;
  spec.duration_s = 0.6;
  const auto w = pipeline::toy_utterance(spec, 0, 0, 0, "neutral");
  const auto f = units::mfcc_fallback(w, cfg);
  CHECK(f.dim() == 39);
  CHECK(f.length() == dsp::compute_mel(w, cfg).n_frames());
  CHECK(f.source == units::FeatureSource::kMfccFallback);

  // Static coefficients match a direct-summation DCT of the log-mel rows.
  const auto mel = dsp::compute_mel(w, cfg);
  const int n = mel.n_channels();
  for (int t = 0; t < f.length(); t += 7) {
    for (int k = 0; k < cfg.n_mfcc; ++k) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i)
        acc += double(mel.frames.at(t, i)) *
               std::cos(3.14159265358979323846 * (2.0 * i + 1.0) * k / (2.0 * n));
      acc *= (k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n));
      // Features persist as float32; compare after the same cast.
      CHECK(std::abs(double(float(acc)) - double(f.mat.at(t, k))) < 1e-9);
    }
  }

  // Silence: constant rows (deltas zero, statics identical).
  dsp::Waveform sil;
  sil.sample_rate = 16000;
  sil.utt_id = "sil";
  sil.samples.assign(8000, 0.0f);
  const auto fs = units::mfcc_fallback(sil, cfg);
  for (int t = 1; t < fs.length(); ++t)
    for (int d = 0; d < fs.dim(); ++d)
      CHECK(fs.mat.at(t, d) == fs.mat.at(0, d));
}

TEST_CASE("kmeans: k=1 centroid is the global mean") {
  std::vector<FrameFeatures> feats{random_features(50, 6, 1),
                                   random_features(30, 6, 2)};
  const auto cb = units::train_codebook(feats, 1, 7);
  for (int d = 0; d < 6; ++d) {
    double mean = 0.0;
    int64_t n = 0;
    for (const auto& f : feats)
      for (int r = 0; r < f.length(); ++r, ++n) mean += double(f.mat.at(r, d));
    mean /= double(n);
    CHECK(std::abs(double(cb.centroids.at(0, d)) - mean) < 1e-6);
  }
}

TEST_CASE("kmeans: N distinct frames fit perfectly with zero inertia") {
  FrameFeatures f;
  f.mat = TensorF(8, 3);
  f.utt_id = "grid";
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 3; ++c) f.mat.at(r, c) = float(10 * r + c);
  const auto cb = units::train_codebook({f}, 8, 3);
  CHECK(cb.inertia == doctest::Approx(0.0).epsilon(1e-12));
  // No two centroids identical.
  for (int i = 0; i < 8; ++i)
    for (int j = i + 1; j < 8; ++j) {
      bool same = true;
      for (int c = 0; c < 3; ++c)
        same = same && cb.centroids.at(i, c) == cb.centroids.at(j, c);
      CHECK_FALSE(same);
    }
}

TEST_CASE("kmeans: two separated blobs recover the blob means") {
  FrameFeatures f;
  f.mat = TensorF(400, 4);
  f.utt_id = "blobs";
  Rng rng(11);
  std::vector<std::array<double, 4>> means = {{5, 5, 5, 5}, {-5, -5, -5, -5}};
  for (int r = 0; r < 400; ++r)
    for (int c = 0; c < 4; ++c)
      f.mat.at(r, c) = float(means[size_t(r % 2)][size_t(c)] + 0.3 * rng.normal());
  const auto cb = units::train_codebook({f}, 2, 21);
  // Match each centroid to its nearest blob mean.
  for (int k = 0; k < 2; ++k) {
    double d0 = 0.0, d1 = 0.0;
    for (int c = 0; c < 4; ++c) {
      d0 += std::pow(double(cb.centroids.at(k, c)) - means[0][size_t(c)], 2.0);
      d1 += std::pow(double(cb.centroids.at(k, c)) - means[1][size_t(c)], 2.0);
    }
    CHECK(std::min(d0, d1) < 0.1 * 0.1 * 4.0);
  }
}

TEST_CASE("kmeans: inertia history is monotone non-increasing") {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    const auto f = random_features(300, 5, 100 + seed);
    const auto cb = units::train_codebook({f}, 12, seed);
    REQUIRE(!cb.inertia_history.empty());
    for (size_t i = 1; i < cb.inertia_history.size(); ++i)
      CHECK(cb.inertia_history[i] <= cb.inertia_history[i - 1] * (1.0 + 1e-12) + 1e-12);
    // Reassigning training frames to the returned codebook never beats the
    // recorded inertia.
    double reassigned = 0.0;
    for (int r = 0; r < f.length(); ++r) {
      double best = 1e300;
      for (int k = 0; k < cb.vocab_size(); ++k) {
        double d = 0.0;
        for (int c = 0; c < f.dim(); ++c) {
          const double diff = double(f.mat.at(r, c)) - double(cb.centroids.at(k, c));
          d += diff * diff;
        }
        best = std::min(best, d);
      }
      reassigned += best;
    }
    CHECK(reassigned <= cb.inertia * (1.0 + 1e-9) + 1e-9);
  }
}

TEST_CASE("kmeans: deterministic for a fixed seed, subsampling included") {
  std::vector<FrameFeatures> feats{random_features(200, 8, 31),
                                   random_features(150, 8, 32)};
  const auto a = units::train_codebook(feats, 10, 77);
  const auto b = units::train_codebook(feats, 10, 77);
  CHECK(a.centroids.v == b.centroids.v);
  CHECK(a.inertia == b.inertia);
  units::KmeansOptions opts;
  opts.subsample = 120;
  const auto c = units::train_codebook(feats, 10, 77, opts);
  const auto d = units::train_codebook(feats, 10, 77, opts);
  CHECK(c.centroids.v == d.centroids.v);
  CHECK(units::train_codebook(feats, 10, 78).centroids.v != a.centroids.v);
}

TEST_CASE("kmeans: errors on too-few frames or empty input") {
  CHECK_THROWS_AS(units::train_codebook({}, 2, 1), Error);
  CHECK_THROWS_AS(units::train_codebook({random_features(3, 4, 1)}, 5, 1), Error);
}

TEST_CASE("quantize: exact centroid hits, tie-break, brute-force oracle") {
  Codebook cb;
  cb.centroids = TensorF(10, 4);
  Rng rng(17);
  for (auto& x : cb.centroids.v) x = float(rng.uniform(-1.0, 1.0));

  // A frame equal to centroid 7 quantizes to 7.
  FrameFeatures f;
  f.mat = TensorF(1, 4);
  f.utt_id = "hit";
  std::copy(cb.centroids.row(7), cb.centroids.row(7) + 4, f.mat.row(0));
  CHECK(units::quantize(f, cb).ids[0] == 7);

  // Equidistant frame between centroids 2 and 5 resolves to the lower index.
  Codebook tie;
  tie.centroids = TensorF(6, 1);
  tie.centroids.at(2, 0) = 1.0f;
  tie.centroids.at(5, 0) = -1.0f;
  for (int k : {0, 1, 3, 4}) tie.centroids.at(k, 0) = 100.0f + float(k);
  FrameFeatures mid;
  mid.mat = TensorF(1, 1);
  mid.utt_id = "tie";
  mid.mat.at(0, 0) = 0.0f;
  CHECK(units::quantize(mid, tie).ids[0] == 2);

  // Random frames match an exhaustive scan.
  const auto batch = random_features(500, 4, 71);
  const auto q = units::quantize(batch, cb);
  for (int r = 0; r < batch.length(); ++r) {
    int best = 0;
    double best_d = 1e300;
    for (int k = 0; k < cb.vocab_size(); ++k) {
      double d = 0.0;
      for (int c = 0; c < 4; ++c) {
        const double diff = double(batch.mat.at(r, c)) - double(cb.centroids.at(k, c));
        d += diff * diff;
      }
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    CHECK(q.ids[size_t(r)] == best);
  }
  // Dimension mismatch is rejected.
  CHECK_THROWS_AS(units::quantize(random_features(5, 3, 1), cb), Error);
}

TEST_CASE("refine: worked example, adjacency rule, idempotence") {
  units::UnitSequence u;
  u.utt_id = "ex";
  u.vocab_size = 64;
  u.ids = {23, 23, 23, 2, 2, 14, 14, 14, 14, 57};
  const auto r = units::refine(u);
  CHECK(r.ids == std::vector<int>{23, 2, 14, 57});

  units::UnitSequence single{{5}, "s", 8};
  CHECK(units::refine(single).ids == std::vector<int>{5});

  units::UnitSequence alt{{1, 2, 1}, "a", 8};
  CHECK(units::refine(alt).ids == std::vector<int>{1, 2, 1});  // non-adjacent survive

  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    units::UnitSequence rndseq;
    rndseq.utt_id = "r";
    rndseq.vocab_size = 5;
    const int len = 1 + int(rng.uniform_int(60));
    for (int i = 0; i < len; ++i) rndseq.ids.push_back(int(rng.uniform_int(5)));
    const auto once = units::refine(rndseq);
    CHECK(once.ids.size() <= rndseq.ids.size());
    CHECK(!once.ids.empty());
    for (size_t i = 1; i < once.ids.size(); ++i)
      CHECK(once.ids[i] != once.ids[i - 1]);
    units::UnitSequence again{once.ids, once.utt_id, once.vocab_size};
    CHECK(units::refine(again).ids == once.ids);  // idempotent
  }
}

TEST_CASE("unit and codebook files round trip") {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "trivox_units_test";
  fs::create_directories(dir);

  const std::string upath = (dir / "units.txt").string();
  std::vector<std::pair<std::string, std::vector<int>>> rows = {
      {"a", {1, 2, 3}}, {"b", {7}}, {"c", {0, 0, 5}}};
  units::save_units(upath, rows);
  CHECK(units::load_units(upath) == rows);

  Codebook cb;
  cb.centroids = TensorF(4, 3);
  cb.train_seed = 99;
  Rng rng(1);
  for (auto& x : cb.centroids.v) x = float(rng.uniform(-1.0, 1.0));
  const std::string cpath = (dir / "cb.pkmc").string();
  units::save_codebook(cpath, cb);
  const auto r = units::load_codebook(cpath);
  CHECK(r.centroids.v == cb.centroids.v);
  CHECK(r.train_seed == 99);
}
