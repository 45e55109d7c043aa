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

#include "eval/ser.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "core/check.h"
#include "core/rng.h"
#include "dsp/signal.h"
#include "model/checkpoint.h"
#include "nn/layers.h"
#include "train/adam.h"

namespace trivox::eval {

using model::Reconstructor;
using model::StyleRole;
using nn::Binder;
using nn::Fwd;
using nn::Graph;
using nn::Var;

std::string EvalReport::to_text() const {
  std::ostringstream os;
  os.precision(6);
  os << "n_classes " << n_classes << "\n";
  os << "n_utterances " << n_utterances << "\n";
  os << "wa " << wa << "\n";
  os << "ua " << ua << "\n";
  os << "fold_mean_wa " << fold_mean_wa << "\n";
  os << "fold_mean_ua " << fold_mean_ua << "\n";
  for (size_t i = 0; i < fold_wa.size(); ++i)
    os << "fold" << i << "_wa " << fold_wa[i] << " fold" << i << "_ua "
       << fold_ua[i] << "\n";
  os << "confusion_rows actual, confusion_cols predicted\n";
  for (int r = 0; r < confusion.rows; ++r) {
    for (int c = 0; c < confusion.cols; ++c)
      os << confusion.at(r, c) << (c + 1 < confusion.cols ? ' ' : '\n');
  }
  return os.str();
}

void EvalReport::write_confusion_csv(const std::string& path) const {
  std::ofstream os(path);
  TVX_CHECK(os.good()) << "cannot write " << path;
  os << "actual\\predicted";
  for (int c = 0; c < confusion.cols; ++c)
    os << "," << (c < int(class_names.size()) ? class_names[size_t(c)]
                                              : std::to_string(c));
  os << "\n";
  for (int r = 0; r < confusion.rows; ++r) {
    os << (r < int(class_names.size()) ? class_names[size_t(r)]
                                       : std::to_string(r));
    for (int c = 0; c < confusion.cols; ++c) os << "," << confusion.at(r, c);
    os << "\n";
  }
}

EvalReport assemble_report(const std::vector<std::vector<int>>& fold_preds,
                           const std::vector<std::vector<int>>& fold_labels,
                           int n_classes,
                           const std::vector<std::string>& class_names) {
  TVX_CHECK(fold_preds.size() == fold_labels.size()) << "fold count mismatch";
  EvalReport rep;
  rep.n_classes = n_classes;
  rep.class_names = class_names;
  rep.confusion = Tensor<int64_t>(n_classes, n_classes);
  std::vector<int> all_preds, all_labels;
  for (size_t f = 0; f < fold_preds.size(); ++f) {
    rep.fold_wa.push_back(compute_wa(fold_preds[f], fold_labels[f]));
    rep.fold_ua.push_back(compute_ua(fold_preds[f], fold_labels[f], n_classes));
    all_preds.insert(all_preds.end(), fold_preds[f].begin(), fold_preds[f].end());
    all_labels.insert(all_labels.end(), fold_labels[f].begin(),
                      fold_labels[f].end());
  }
  rep.n_utterances = int64_t(all_labels.size());
  rep.confusion = confusion_matrix(all_preds, all_labels, n_classes);
  rep.wa = compute_wa(all_preds, all_labels);
  rep.ua = compute_ua(all_preds, all_labels, n_classes);
  for (size_t f = 0; f < rep.fold_wa.size(); ++f) {
    rep.fold_mean_wa += rep.fold_wa[f];
    rep.fold_mean_ua += rep.fold_ua[f];
  }
  rep.fold_mean_wa /= double(rep.fold_wa.size());
  rep.fold_mean_ua /= double(rep.fold_ua.size());
  return rep;
}

SerDataset build_ser_dataset(const pipeline::Manifest& manifest,
                             const dsp::DspConfig& dsp_cfg) {
  SerDataset d;
  for (const auto& r : manifest.rows) {
    const auto label = map_raw_label(r.raw_label);
    if (!label.has_value()) continue;
    const auto wav = dsp::read_wav(r.wav_path, r.utt_id);
    d.mels.emplace(r.utt_id, dsp::compute_mel(wav, dsp_cfg));
    d.labels.emplace(r.utt_id, *label);
  }
  TVX_CHECK(!d.mels.empty()) << "no labelled utterances in manifest";
  return d;
}

std::map<std::string, std::vector<float>> load_external_reps(
    const std::string& path) {
  std::ifstream is(path);
  TVX_CHECK(is.good()) << "cannot open external representation file " << path;
  std::map<std::string, std::vector<float>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto bar = line.find('|');
    TVX_CHECK(bar != std::string::npos)
        << path << ":" << lineno << ": missing '|'";
    std::istringstream vs(line.substr(bar + 1));
    std::vector<float> vals;
    float v;
    while (vs >> v) vals.push_back(v);
    TVX_CHECK(!vals.empty()) << path << ":" << lineno << ": no values";
    out[line.substr(0, bar)] = std::move(vals);
  }
  return out;
}

namespace {

// Frozen-encoder prosody embedding for one mel.
TensorF prosody_embedding(const Reconstructor<float>& m, const TensorF& mel) {
  Graph<float> g(false);
  Binder<float> bind(g);
  Rng rng(0xebed);
  Fwd<float> f{g, bind, rng, false};
  Var<float> v = m.encode_style(f, g.leaf(&mel, false), StyleRole::kProsody);
  return g.val(v);
}

// Multinomial logistic head trained on fixed vectors. Returns argmax
// predictions for `eval_idx` using the best-validation epoch (or the final
// epoch when val_idx is empty).
std::vector<int> train_vector_head(const TensorF& X, const std::vector<int>& y,
                                   const std::vector<int>& train_idx,
                                   const std::vector<int>& val_idx,
                                   const std::vector<int>& eval_idx,
                                   int n_classes, double lr, int epochs,
                                   int batch_size, uint64_t seed) {
  nn::ParamStore<float> store(Rng::mix(seed, 0xbead));
  nn::Linear<float> head(store, "head", X.cols, n_classes);
  train::Adam adam(store);

  auto logits_of = [&](const std::vector<int>& idx, Graph<float>& g,
                       Binder<float>& bind) {
    TensorF sub(int(idx.size()), X.cols);
    for (size_t i = 0; i < idx.size(); ++i)
      std::copy(X.row(idx[i]), X.row(idx[i]) + X.cols, sub.row(int(i)));
    Rng rng(0);
    Fwd<float> f{g, bind, rng, true};
    return head.forward(f, g.constant(std::move(sub)));
  };
  auto predict = [&](const std::vector<int>& idx) {
    Graph<float> g(false);
    Binder<float> bind(g);
    Var<float> lg = logits_of(idx, g, bind);
    std::vector<int> preds;
    for (int r = 0; r < g.val(lg).rows; ++r) {
      const float* row = g.val(lg).row(r);
      preds.push_back(int(std::max_element(row, row + n_classes) - row));
    }
    return preds;
  };
  auto wa_of = [&](const std::vector<int>& idx) {
    const auto preds = predict(idx);
    std::vector<int> labels;
    for (int i : idx) labels.push_back(y[size_t(i)]);
    return compute_wa(preds, labels);
  };

  std::vector<TensorF> best_params;
  double best_wa = -1.0;
  std::vector<int> order = train_idx;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    Rng shuffle(Rng::mix(seed, 0x0e0, uint64_t(epoch)));
    for (int i = int(order.size()) - 1; i > 0; --i)
      std::swap(order[size_t(i)], order[shuffle.uniform_int(uint64_t(i) + 1)]);
    for (size_t start = 0; start < order.size(); start += size_t(batch_size)) {
      std::vector<int> idx(order.begin() + std::ptrdiff_t(start),
                           order.begin() + std::ptrdiff_t(std::min(
                                               order.size(),
                                               start + size_t(batch_size))));
      Graph<float> g(true);
      Binder<float> bind(g);
      Var<float> lg = logits_of(idx, g, bind);
      std::vector<int> labels;
      for (int i : idx) labels.push_back(y[size_t(i)]);
      Var<float> ce = g.cross_entropy_logits(lg, labels);
      g.backward(ce);
      std::vector<const TensorF*> grads;
      for (const auto& p : store.all()) grads.push_back(bind.grad_of(p.get()));
      adam.step(grads, lr, 1.0);
    }
    if (!val_idx.empty()) {
      const double w = wa_of(val_idx);
      if (w > best_wa) {
        best_wa = w;
        best_params.clear();
        for (const auto& p : store.all()) best_params.push_back(p->value);
      }
    }
  }
  if (!best_params.empty())
    for (size_t i = 0; i < store.all().size(); ++i)
      store.all()[i]->value = best_params[i];
  return predict(eval_idx);
}

std::vector<int> indices_of(const std::vector<std::string>& ids,
                            const std::map<std::string, int>& pos) {
  std::vector<int> out;
  for (const auto& id : ids) {
    auto it = pos.find(id);
    TVX_CHECK(it != pos.end()) << "utterance " << id << " missing from dataset";
    out.push_back(it->second);
  }
  return out;
}

std::vector<std::string> emotion_names() {
  std::vector<std::string> names;
  for (int c = 0; c < kNumEmotions; ++c)
    names.push_back(emotion_name(EmotionLabel(c)));
  return names;
}

}  // namespace

EvalReport finetune_ser(const std::string& checkpoint_path,
                        const SerDataset& data, const CVPlan& plan,
                        const HeadConfig& cfg) {
  // Stable utterance ordering for embedding matrices.
  std::vector<std::string> ids;
  for (const auto& [id, _] : data.mels) ids.push_back(id);
  std::map<std::string, int> pos;
  std::vector<int> labels;
  for (size_t i = 0; i < ids.size(); ++i) {
    pos[ids[i]] = int(i);
    labels.push_back(int(data.labels.at(ids[i])));
  }

  std::vector<std::vector<int>> fold_preds, fold_labels;
  for (size_t fold = 0; fold < plan.folds.size(); ++fold) {
    const auto& fo = plan.folds[fold];
    const auto train_idx = indices_of(fo.train_ids, pos);
    const auto val_idx = indices_of(fo.val_ids, pos);
    const auto test_idx = indices_of(fo.test_ids, pos);

    auto m = model::load_checkpoint(checkpoint_path);
    std::vector<int> test_preds;
    if (cfg.encoder_lr <= 0.0) {
      // Head-only probe: embeddings are fixed, train on vectors.
      TensorF X(int(ids.size()), m->cfg().prosody_dim);
      for (size_t i = 0; i < ids.size(); ++i) {
        const TensorF e = prosody_embedding(*m, data.mels.at(ids[i]).frames);
        std::copy(e.data(), e.data() + e.size(), X.row(int(i)));
      }
      test_preds = train_vector_head(X, labels, train_idx, val_idx, test_idx,
                                     kNumEmotions, cfg.head_lr, cfg.epochs,
                                     cfg.batch_size,
                                     Rng::mix(cfg.seed, uint64_t(fold)));
    } else {
      // Joint fine-tuning: prosody encoder at encoder_lr, head at head_lr.
      m->params().set_trainable("u2v.", false);
      m->params().set_trainable("dec.", false);
      m->params().set_trainable("cond.", false);
      nn::ParamStore<float> head_store(Rng::mix(cfg.seed, 0xf01d, fold));
      nn::Linear<float> head(head_store, "ser_head", m->cfg().prosody_dim,
                             kNumEmotions);
      train::Adam enc_adam(m->params());
      train::Adam head_adam(head_store);

      auto forward_logits = [&](const std::vector<int>& idx, Graph<float>& g,
                                Binder<float>& bind, bool training) {
        Rng rng(Rng::mix(cfg.seed, 0xf02, uint64_t(fold)));
        Fwd<float> f{g, bind, rng, training};
        std::vector<Var<float>> embs;
        for (int i : idx)
          embs.push_back(m->encode_style(
              f, g.leaf(&data.mels.at(ids[size_t(i)]).frames, false),
              StyleRole::kProsody));
        return head.forward(f, g.concat_rows(embs));
      };
      auto predict = [&](const std::vector<int>& idx) {
        std::vector<int> preds;
        for (int i : idx) {
          Graph<float> g(false);
          Binder<float> bind(g);
          Var<float> lg = forward_logits({i}, g, bind, false);
          const float* row = g.val(lg).row(0);
          preds.push_back(
              int(std::max_element(row, row + kNumEmotions) - row));
        }
        return preds;
      };
      auto wa_of = [&](const std::vector<int>& idx) {
        const auto preds = predict(idx);
        std::vector<int> sub;
        for (int i : idx) sub.push_back(labels[size_t(i)]);
        return compute_wa(preds, sub);
      };

      double best_wa = -1.0;
      std::vector<TensorF> best_enc, best_head;
      std::vector<int> order = train_idx;
      for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng shuffle(Rng::mix(cfg.seed, 0x5f1e, uint64_t(fold), uint64_t(epoch)));
        for (int i = int(order.size()) - 1; i > 0; --i)
          std::swap(order[size_t(i)],
                    order[shuffle.uniform_int(uint64_t(i) + 1)]);
        for (size_t start = 0; start < order.size();
             start += size_t(cfg.batch_size)) {
          std::vector<int> idx(
              order.begin() + std::ptrdiff_t(start),
              order.begin() + std::ptrdiff_t(std::min(
                                  order.size(), start + size_t(cfg.batch_size))));
          Graph<float> g(true);
          Binder<float> bind(g);
          Var<float> lg = forward_logits(idx, g, bind, true);
          std::vector<int> sub;
          for (int i : idx) sub.push_back(labels[size_t(i)]);
          g.backward(g.cross_entropy_logits(lg, sub));
          std::vector<const TensorF*> enc_grads, head_grads;
          for (const auto& p : m->params().all())
            enc_grads.push_back(bind.grad_of(p.get()));
          for (const auto& p : head_store.all())
            head_grads.push_back(bind.grad_of(p.get()));
          enc_adam.step(enc_grads, cfg.encoder_lr, 1.0);
          head_adam.step(head_grads, cfg.head_lr, 1.0);
        }
        const double w = wa_of(val_idx);
        if (w > best_wa) {
          best_wa = w;
          best_enc.clear();
          best_head.clear();
          for (const auto& p : m->params().all()) best_enc.push_back(p->value);
          for (const auto& p : head_store.all()) best_head.push_back(p->value);
        }
      }
      if (!best_enc.empty()) {
        for (size_t i = 0; i < m->params().all().size(); ++i)
          m->params().all()[i]->value = best_enc[i];
        for (size_t i = 0; i < head_store.all().size(); ++i)
          head_store.all()[i]->value = best_head[i];
      }
      test_preds = predict(test_idx);
    }

    std::vector<int> test_labels;
    for (int i : test_idx) test_labels.push_back(labels[size_t(i)]);
    fold_preds.push_back(std::move(test_preds));
    fold_labels.push_back(std::move(test_labels));
  }
  return assemble_report(fold_preds, fold_labels, kNumEmotions, emotion_names());
}

EvalReport fuse_and_classify(const std::string& checkpoint_path,
                             const SerDataset& data,
                             const std::string& external_rep_file,
                             const CVPlan& plan, const HeadConfig& cfg) {
  auto m = model::load_checkpoint(checkpoint_path);
  const auto reps = load_external_reps(external_rep_file);

  std::vector<std::string> ids;
  for (const auto& [id, _] : data.mels) ids.push_back(id);
  std::map<std::string, int> pos;
  std::vector<int> labels;
  int ext_dim = -1;
  for (const auto& id : ids) {
    auto it = reps.find(id);
    TVX_CHECK(it != reps.end())
        << "external representation file is missing utterance '" << id << "'";
    if (ext_dim < 0) ext_dim = int(it->second.size());
    TVX_CHECK(int(it->second.size()) == ext_dim)
        << "inconsistent external dim for '" << id << "'";
  }

  const int pdim = m->cfg().prosody_dim;
  TensorF X(int(ids.size()), pdim + ext_dim);
  for (size_t i = 0; i < ids.size(); ++i) {
    pos[ids[i]] = int(i);
    labels.push_back(int(data.labels.at(ids[i])));
    const TensorF e = prosody_embedding(*m, data.mels.at(ids[i]).frames);
    std::copy(e.data(), e.data() + pdim, X.row(int(i)));
    const auto& ext = reps.at(ids[i]);
    std::copy(ext.begin(), ext.end(), X.row(int(i)) + pdim);
  }

  std::vector<std::vector<int>> fold_preds, fold_labels;
  for (size_t fold = 0; fold < plan.folds.size(); ++fold) {
    const auto& fo = plan.folds[fold];
    const auto preds = train_vector_head(
        X, labels, indices_of(fo.train_ids, pos), indices_of(fo.val_ids, pos),
        indices_of(fo.test_ids, pos), kNumEmotions, cfg.head_lr, cfg.epochs,
        cfg.batch_size, Rng::mix(cfg.seed, 0xfa5e, fold));
    std::vector<int> tl;
    for (const auto& id : fo.test_ids) tl.push_back(labels[size_t(pos[id])]);
    fold_preds.push_back(preds);
    fold_labels.push_back(std::move(tl));
  }
  return assemble_report(fold_preds, fold_labels, kNumEmotions, emotion_names());
}

double probe_speaker(const std::string& checkpoint_path,
                     const std::map<std::string, dsp::MelSpectrogram>& mels,
                     const std::map<std::string, std::string>& speaker_of,
                     const HeadConfig& cfg) {
  auto m = model::load_checkpoint(checkpoint_path);
  std::vector<std::string> ids;
  for (const auto& [id, _] : mels) ids.push_back(id);

  std::map<std::string, int> speaker_index;
  for (const auto& id : ids) {
    auto it = speaker_of.find(id);
    TVX_CHECK(it != speaker_of.end()) << "no speaker for utterance " << id;
    speaker_index.emplace(it->second, int(speaker_index.size()));
  }
  const int n_speakers = int(speaker_index.size());
  TVX_CHECK(n_speakers >= 2) << "speaker probe needs at least two speakers";

  const int pdim = m->cfg().prosody_dim;
  TensorF X(int(ids.size()), pdim);
  std::vector<int> y;
  for (size_t i = 0; i < ids.size(); ++i) {
    const TensorF e = prosody_embedding(*m, mels.at(ids[i]).frames);
    std::copy(e.data(), e.data() + pdim, X.row(int(i)));
    y.push_back(speaker_index.at(speaker_of.at(ids[i])));
  }

  // Seeded 9:1 utterance split.
  std::vector<int> order(ids.size());
  for (size_t i = 0; i < ids.size(); ++i) order[i] = int(i);
  Rng rng(Rng::mix(cfg.seed, 0x91));
  for (int i = int(order.size()) - 1; i > 0; --i)
    std::swap(order[size_t(i)], order[rng.uniform_int(uint64_t(i) + 1)]);
  const size_t n_test = std::max<size_t>(1, ids.size() / 10);
  std::vector<int> test_idx(order.begin(), order.begin() + std::ptrdiff_t(n_test));
  std::vector<int> train_idx(order.begin() + std::ptrdiff_t(n_test), order.end());

  const auto preds =
      train_vector_head(X, y, train_idx, {}, test_idx, n_speakers, cfg.head_lr,
                        cfg.epochs, cfg.batch_size, Rng::mix(cfg.seed, 0x59c2));
  std::vector<int> tl;
  for (int i : test_idx) tl.push_back(y[size_t(i)]);
  return compute_wa(preds, tl);
}

EvalReport classify_units(
    const std::map<std::string, std::vector<int>>& sequences,
    const std::map<std::string, int>& labels, const CVPlan& plan,
    const UnitClassifierConfig& cfg) {
  TVX_CHECK(cfg.vocab_size > 0) << "classifier vocab_size unset";
  for (const auto& [id, seq] : sequences) {
    TVX_CHECK(!seq.empty()) << "empty sequence for " << id;
    for (size_t i = 0; i < seq.size(); ++i) {
      TVX_CHECK(0 <= seq[i] && seq[i] < cfg.vocab_size)
          << "vocabulary overflow in " << id << ": token " << seq[i]
          << " >= " << cfg.vocab_size;
      if (cfg.expect_deduplicated && i > 0)
        TVX_CHECK(seq[i] != seq[i - 1])
            << "adjacent repeat in supposedly deduplicated input " << id;
    }
  }

  std::vector<std::string> ids;
  for (const auto& [id, _] : sequences) ids.push_back(id);
  std::map<std::string, int> pos;
  std::vector<int> y;
  for (size_t i = 0; i < ids.size(); ++i) {
    pos[ids[i]] = int(i);
    y.push_back(labels.at(ids[i]));
  }

  model::ModelConfig enc_cfg = cfg.encoder_cfg;
  enc_cfg.n_mel = cfg.embed_dim;

  std::vector<std::vector<int>> fold_preds, fold_labels;
  for (size_t fold = 0; fold < plan.folds.size(); ++fold) {
    const auto& fo = plan.folds[fold];
    nn::ParamStore<float> store(Rng::mix(cfg.seed, 0xc1a5, fold));
    nn::Param<float>* table = store.weight("cls.embed", cfg.vocab_size,
                                           cfg.embed_dim, cfg.embed_dim);
    model::StyleEncoder<float> enc(store, "cls.enc", enc_cfg,
                                   enc_cfg.prosody_dim);
    nn::Linear<float> head(store, "cls.head", enc_cfg.prosody_dim,
                           cfg.n_classes);
    train::Adam adam(store);

    auto forward_logits = [&](const std::vector<int>& idx, Graph<float>& g,
                              Binder<float>& bind, bool training) {
      Rng rng(Rng::mix(cfg.seed, 0xc1f, fold));
      Fwd<float> f{g, bind, rng, training};
      std::vector<Var<float>> embs;
      for (int i : idx) {
        Var<float> tok = g.embedding(bind(table), sequences.at(ids[size_t(i)]));
        embs.push_back(enc.forward(f, tok));
      }
      return head.forward(f, g.concat_rows(embs));
    };
    auto predict = [&](const std::vector<int>& idx) {
      std::vector<int> preds;
      for (int i : idx) {
        Graph<float> g(false);
        Binder<float> bind(g);
        Var<float> lg = forward_logits({i}, g, bind, false);
        const float* row = g.val(lg).row(0);
        preds.push_back(int(std::max_element(row, row + cfg.n_classes) - row));
      }
      return preds;
    };
    auto wa_of = [&](const std::vector<int>& idx) {
      const auto preds = predict(idx);
      std::vector<int> sub;
      for (int i : idx) sub.push_back(y[size_t(i)]);
      return compute_wa(preds, sub);
    };

    const auto train_idx = indices_of(fo.train_ids, pos);
    const auto val_idx = indices_of(fo.val_ids, pos);
    const auto test_idx = indices_of(fo.test_ids, pos);
    double best_wa = -1.0;
    std::vector<TensorF> best;
    std::vector<int> order = train_idx;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      Rng shuffle(Rng::mix(cfg.seed, 0xc1e, fold, uint64_t(epoch)));
      for (int i = int(order.size()) - 1; i > 0; --i)
        std::swap(order[size_t(i)], order[shuffle.uniform_int(uint64_t(i) + 1)]);
      for (size_t start = 0; start < order.size();
           start += size_t(cfg.batch_size)) {
        std::vector<int> idx(
            order.begin() + std::ptrdiff_t(start),
            order.begin() + std::ptrdiff_t(
                                std::min(order.size(),
                                         start + size_t(cfg.batch_size))));
        Graph<float> g(true);
        Binder<float> bind(g);
        Var<float> lg = forward_logits(idx, g, bind, true);
        std::vector<int> sub;
        for (int i : idx) sub.push_back(y[size_t(i)]);
        g.backward(g.cross_entropy_logits(lg, sub));
        std::vector<const TensorF*> grads;
        for (const auto& p : store.all()) grads.push_back(bind.grad_of(p.get()));
        adam.step(grads, cfg.lr, 1.0);
      }
      const double w = val_idx.empty() ? 0.0 : wa_of(val_idx);
      if (w >= best_wa) {
        best_wa = w;
        best.clear();
        for (const auto& p : store.all()) best.push_back(p->value);
      }
    }
    if (!best.empty())
      for (size_t i = 0; i < store.all().size(); ++i)
        store.all()[i]->value = best[i];

    fold_preds.push_back(predict(test_idx));
    std::vector<int> tl;
    for (int i : test_idx) tl.push_back(y[size_t(i)]);
    fold_labels.push_back(std::move(tl));
  }
  return assemble_report(fold_preds, fold_labels, cfg.n_classes,
                         cfg.class_names);
}

}  // namespace trivox::eval
