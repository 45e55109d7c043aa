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

#include "eval/metrics.h"

#include <algorithm>
#include <cmath>

#include "core/check.h"

namespace trivox::eval {

double compute_wa(const std::vector<int>& preds, const std::vector<int>& labels) {
  TVX_CHECK(!labels.empty()) << "compute_wa on empty input";
  TVX_CHECK(preds.size() == labels.size())
      << "compute_wa: " << preds.size() << " preds vs " << labels.size()
      << " labels";
  int64_t correct = 0;
  for (size_t i = 0; i < labels.size(); ++i)
    if (preds[i] == labels[i]) ++correct;
  return double(correct) / double(labels.size());
}

double compute_ua(const std::vector<int>& preds, const std::vector<int>& labels,
                  int n_classes) {
  TVX_CHECK(!labels.empty()) << "compute_ua on empty input";
  TVX_CHECK(preds.size() == labels.size()) << "compute_ua: length mismatch";
  TVX_CHECK(n_classes >= 1) << "compute_ua: need at least one class";
  std::vector<int64_t> correct(size_t(n_classes), 0), total(size_t(n_classes), 0);
  for (size_t i = 0; i < labels.size(); ++i) {
    TVX_CHECK(0 <= labels[i] && labels[i] < n_classes)
        << "label " << labels[i] << " out of range";
    ++total[size_t(labels[i])];
    if (preds[i] == labels[i]) ++correct[size_t(labels[i])];
  }
  double sum = 0.0;
  for (int c = 0; c < n_classes; ++c) {
    TVX_CHECK(total[size_t(c)] > 0)
        << "class " << c << " absent from labels; unweighted accuracy undefined";
    sum += double(correct[size_t(c)]) / double(total[size_t(c)]);
  }
  return sum / double(n_classes);
}

Tensor<int64_t> confusion_matrix(const std::vector<int>& preds,
                                 const std::vector<int>& labels, int n_classes) {
  TVX_CHECK(preds.size() == labels.size()) << "confusion: length mismatch";
  Tensor<int64_t> m(n_classes, n_classes);
  for (size_t i = 0; i < labels.size(); ++i) {
    TVX_CHECK(0 <= labels[i] && labels[i] < n_classes) << "label out of range";
    TVX_CHECK(0 <= preds[i] && preds[i] < n_classes) << "prediction out of range";
    ++m.at(labels[i], preds[i]);
  }
  return m;
}

double mcd_db(const dsp::MelCepstra& target, const dsp::MelCepstra& converted) {
  const auto& t = target.coeffs;
  const auto& c = converted.coeffs;
  TVX_CHECK(t.rows > 0 && c.rows > 0) << "mcd on empty cepstra";
  TVX_CHECK(t.cols == c.cols) << "mcd: coefficient count mismatch";
  const int frames = std::min(t.rows, c.rows);
  const double k = 10.0 / std::log(10.0);
  double acc = 0.0;
  for (int r = 0; r < frames; ++r) {
    double sq = 0.0;
    for (int i = 0; i < t.cols; ++i) {
      const double d = t.at(r, i) - c.at(r, i);
      sq += d * d;
    }
    acc += k * std::sqrt(2.0 * sq);
  }
  return acc / double(frames);
}

double f0_rmse_hz(const dsp::PitchTrack& target, const dsp::PitchTrack& converted) {
  TVX_CHECK(!target.f0_hz.empty() && !converted.f0_hz.empty())
      << "f0_rmse on empty pitch track";
  const size_t frames = std::min(target.f0_hz.size(), converted.f0_hz.size());
  double acc = 0.0;
  for (size_t i = 0; i < frames; ++i) {
    const double d = target.f0_hz[i] - converted.f0_hz[i];
    acc += d * d;
  }
  return std::sqrt(acc / double(frames));
}

}  // namespace trivox::eval
