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

#include "train/trainer.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>

#include "core/check.h"
#include "core/kernels.h"

namespace trivox::train {

using model::StyleRole;
using nn::Binder;
using nn::Fwd;
using nn::Graph;
using nn::Var;

namespace {

TensorF stop_targets(int frames) {
  TensorF t(frames, 1);
  t[frames - 1] = 1.0f;
  return t;
}

struct SampleResult {
  std::unique_ptr<Graph<float>> graph;
  std::unique_ptr<Binder<float>> binder;
  double sse = 0.0;
  int64_t count = 0;
};

}  // namespace

Trainer::Trainer(model::Reconstructor<float>& m, const TrainConfig& cfg)
    : model_(m), cfg_(cfg), adam_(m.params()), rng_(Rng::mix(cfg.seed, 0x7a11)) {
  cfg_.validate();
}

StepStats Trainer::train_step(const std::vector<TrainSample>& batch,
                              int64_t step) {
  TVX_CHECK(!batch.empty()) << "empty batch";
  const double sp = sampling_prob_at(step, cfg_);
  const int B = int(batch.size());

  int64_t total_elems = 0;
  for (const auto& s : batch) total_elems += s.target_mel.size();

  std::vector<SampleResult> results(static_cast<size_t>(B));
#pragma omp parallel for schedule(dynamic, 1)
  for (int b = 0; b < B; ++b) {
    // Kernel-level parallelism is redundant while samples run in parallel.
    kernels::set_thread_mode(kernels::Mode::kSerial);
    const TrainSample& s = batch[size_t(b)];
    auto g = std::make_unique<Graph<float>>(true);
    auto bind = std::make_unique<Binder<float>>(*g);
    Rng srng(Rng::mix(cfg_.seed, 0x57e9, uint64_t(step), uint64_t(b)));
    Fwd<float> f{*g, *bind, srng, /*training=*/true};

    auto res = model_.reconstruct(f, s.units, s.speaker_ref_mel, s.prosody_mel,
                                  &s.target_mel, sp);
    Var<float> sse = g->sse(res.mel_var, s.target_mel);
    Var<float> stop_bce =
        g->bce_logits(res.stop_var, stop_targets(s.target_mel.rows),
                      cfg_.stop_pos_weight);
    Var<float> obj = g->lincomb(1.0 / double(total_elems), sse,
                                cfg_.stop_loss_weight / double(B), stop_bce);
    const double sse_val = double(g->val(sse)[0]);
    if (std::isfinite(sse_val)) g->backward(obj);
    results[size_t(b)].sse = sse_val;
    results[size_t(b)].count = s.target_mel.size();
    results[size_t(b)].graph = std::move(g);
    results[size_t(b)].binder = std::move(bind);
    kernels::clear_thread_mode();
  }

  double total_sse = 0.0;
  for (int b = 0; b < B; ++b) {
    TVX_CHECK(std::isfinite(results[size_t(b)].sse))
        << "non-finite loss at step " << step << ", batch index " << b
        << " (utt index " << batch[size_t(b)].utt_index << ", sse "
        << results[size_t(b)].sse << ")";
    total_sse += results[size_t(b)].sse;
  }

  // Deterministic gradient merge in sample order.
  const auto& params = model_.params().all();
  std::vector<TensorF> accum(params.size());
  std::vector<char> touched(params.size(), 0);
  for (int b = 0; b < B; ++b) {
    for (size_t i = 0; i < params.size(); ++i) {
      const TensorF* gp = results[size_t(b)].binder->grad_of(params[i].get());
      if (gp == nullptr) continue;
      if (!touched[i]) {
        accum[i] = *gp;
        touched[i] = 1;
      } else {
        for (int64_t j = 0; j < accum[i].size(); ++j) accum[i][j] += (*gp)[j];
      }
    }
  }
  std::vector<const TensorF*> gptrs(params.size(), nullptr);
  for (size_t i = 0; i < params.size(); ++i)
    if (touched[i]) gptrs[i] = &accum[i];

  StepStats st;
  st.grad_norm = adam_.step(gptrs, lr_at(step, cfg_), cfg_.grad_clip);
  st.mse = total_sse / double(total_elems);
  return st;
}

double Trainer::validation_mse(const std::vector<TrainSample>& val) const {
  TVX_CHECK(!val.empty()) << "empty validation set";
  double total_sse = 0.0;
  int64_t total = 0;
  for (size_t i = 0; i < val.size(); ++i) {
    const TrainSample& s = val[i];
    Graph<float> g(false);
    Binder<float> bind(g);
    Rng srng(Rng::mix(cfg_.seed, 0xe7a1, uint64_t(i)));
    Fwd<float> f{g, bind, srng, /*training=*/false};
    auto res = model_.reconstruct(f, s.units, s.speaker_ref_mel, s.prosody_mel,
                                  &s.target_mel, 1.0);
    const TensorF& out = res.mel;
    for (int64_t j = 0; j < out.size(); ++j) {
      const double d = double(out[j]) - double(s.target_mel[j]);
      total_sse += d * d;
    }
    total += out.size();
  }
  return total_sse / double(total);
}

double Trainer::alignment_entropy(const TrainSample& s) const {
  Graph<float> g(false);
  Binder<float> bind(g);
  Rng srng(Rng::mix(cfg_.seed, 0xa119));
  Fwd<float> f{g, bind, srng, /*training=*/false};
  auto res = model_.reconstruct(f, s.units, s.speaker_ref_mel, s.prosody_mel,
                                &s.target_mel, 1.0);
  double h = 0.0;
  for (int r = 0; r < res.alignments.rows; ++r) {
    double row_h = 0.0;
    for (int c = 0; c < res.alignments.cols; ++c) {
      const double p = double(res.alignments.at(r, c));
      if (p > 1e-12) row_h -= p * std::log(p);
    }
    h += row_h;
  }
  return h / res.alignments.rows;
}

std::pair<std::vector<TrainUtt>, std::vector<TrainUtt>> split_validation(
    const std::vector<TrainUtt>& utts, int val_count, uint64_t seed) {
  TVX_CHECK(utts.size() >= 2) << "need at least two utterances to hold out";
  const int n = int(utts.size());
  const int k = std::min(val_count, n - 1);
  std::vector<int> order(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) order[size_t(i)] = i;
  Rng rng(Rng::mix(seed, 0x5117));
  for (int i = n - 1; i > 0; --i)
    std::swap(order[size_t(i)], order[size_t(rng.uniform_int(uint64_t(i) + 1))]);
  std::vector<TrainUtt> train, val;
  for (int i = 0; i < n; ++i)
    (i < k ? val : train).push_back(utts[size_t(order[size_t(i)])]);
  return {std::move(train), std::move(val)};
}

std::vector<TrainSample> make_eval_samples(const std::vector<TrainUtt>& utts) {
  std::vector<TrainSample> out;
  for (size_t i = 0; i < utts.size(); ++i) {
    const TrainUtt& u = utts[i];
    size_t base = 0;
    for (size_t v = 0; v < u.factors.size(); ++v)
      if (u.factors[v] == 1.0) base = v;
    TrainSample s;
    s.utt_index = int(i);
    s.variant = int(base);
    s.target_mel = u.mels[base].frames;
    s.units = u.units[base];
    s.prosody_mel = s.target_mel;
    s.speaker_ref_is_self = true;
    s.speaker_ref_mel = s.target_mel;
    for (size_t j = 0; j < utts.size(); ++j)
      if (j != i && utts[j].speaker_id == u.speaker_id) {
        size_t jb = 0;
        for (size_t v = 0; v < utts[j].factors.size(); ++v)
          if (utts[j].factors[v] == 1.0) jb = v;
        s.speaker_ref_mel = utts[j].mels[jb].frames;
        s.speaker_ref_is_self = false;
        break;
      }
    out.push_back(std::move(s));
  }
  return out;
}

int64_t Trainer::pretrain(const std::vector<TrainUtt>& utts,
                          const dsp::AugmentSpec& augment,
                          const std::string& out_dir,
                          const std::string& resume_from,
                          int64_t stop_at_step) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  auto [train_utts, val_utts] =
      split_validation(utts, cfg_.val_count, cfg_.seed);
  const auto val_samples = make_eval_samples(val_utts);
  Batcher batcher(&train_utts, augment, cfg_.batch_size, cfg_.seed);
  const int bpe =
      (batcher.utt_count() + cfg_.batch_size - 1) / cfg_.batch_size;

  int64_t step = 0;
  double best = std::numeric_limits<double>::infinity();
  int evals_since_best = 0;
  if (!resume_from.empty()) {
    model::TrainerState st;
    auto loaded = model::load_checkpoint(resume_from, &st);
    TVX_CHECK(loaded->cfg().serialize() == model_.cfg().serialize())
        << "resume checkpoint config mismatch";
    for (size_t i = 0; i < loaded->params().all().size(); ++i)
      model_.params().all()[i]->value = loaded->params().all()[i]->value;
    if (st.has_optimizer)
      adam_.restore(st.adam_t, std::move(st.adam_m), std::move(st.adam_v));
    rng_.set_state(st.rng_state);
    step = int64_t(st.global_step);
    if (st.extras.count("best_val_mse")) best = st.extras.at("best_val_mse");
    if (st.extras.count("evals_since_best"))
      evals_since_best = int(st.extras.at("evals_since_best"));
  }

  auto save = [&](const std::string& name) {
    model::TrainerState st;
    st.global_step = uint64_t(step);
    st.rng_state = rng_.state();
    st.extras["best_val_mse"] = best;
    st.extras["evals_since_best"] = evals_since_best;
    st.has_optimizer = true;
    st.adam_t = adam_.t();
    st.adam_m = adam_.m();
    st.adam_v = adam_.v();
    model::save_checkpoint(out_dir + "/" + name, model_, &st);
  };

  const int64_t horizon =
      stop_at_step > 0 ? std::min<int64_t>(stop_at_step, cfg_.max_steps)
                       : cfg_.max_steps;
  int cached_epoch = -1;
  std::vector<std::vector<TrainSample>> cached_batches;
  bool stopped_early = false;
  while (step < horizon && !stopped_early) {
    const int epoch = int(step / bpe);
    const int idx = int(step % bpe);
    if (epoch != cached_epoch) {
      cached_batches = batcher.epoch(epoch);
      cached_epoch = epoch;
    }
    const StepStats st = train_step(cached_batches[size_t(idx)], step);
    CurveRow row;
    row.step = step;
    row.train_mse = st.mse;
    row.lr = lr_at(step, cfg_);
    row.grad_norm = st.grad_norm;
    ++step;

    if (step % cfg_.eval_every == 0 || step >= cfg_.max_steps) {
      const double val = validation_mse(val_samples);
      row.val_mse = val;
      if (best - val > cfg_.min_delta) {
        best = val;
        evals_since_best = 0;
        save("best.ckpt");
      } else {
        ++evals_since_best;
        if (evals_since_best >= cfg_.patience) stopped_early = true;
      }
      save("last.ckpt");
    }
    curve_.push_back(row);
    if (step % cfg_.eval_every == 0 || step >= cfg_.max_steps || stopped_early)
      write_curve(out_dir + "/curve.csv");
  }
  if (!fs::exists(out_dir + "/best.ckpt")) save("best.ckpt");
  save("last.ckpt");
  write_curve(out_dir + "/curve.csv");
  return step;
}

void Trainer::write_curve(const std::string& path) const {
  std::ofstream os(path);
  TVX_CHECK(os.good()) << "cannot write training curve: " << path;
  os << "step,train_mse,val_mse,lr,grad_norm\n";
  os.precision(10);
  for (const auto& r : curve_) {
    os << r.step << "," << r.train_mse << ",";
    if (r.val_mse >= 0.0) os << r.val_mse;
    os << "," << r.lr << "," << r.grad_norm << "\n";
  }
}

}  // namespace trivox::train
