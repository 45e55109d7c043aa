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

#include "pipeline/config.h"

#include <fstream>
#include <set>
#include <sstream>

#include "core/check.h"

namespace trivox::pipeline {

KeyValues KeyValues::from_file(const std::string& path) {
  std::ifstream is(path);
  TVX_CHECK(is.good()) << "cannot open config file " << path;
  KeyValues kv;
  std::string line;
  while (std::getline(is, line)) kv.merge_line(line);
  return kv;
}

void KeyValues::merge_line(const std::string& line) {
  std::string s = line;
  const auto hash = s.find('#');
  if (hash != std::string::npos) s.resize(hash);
  std::istringstream is(s);
  std::string key, value;
  if (!(is >> key)) return;  // blank or comment
  TVX_CHECK(bool(is >> value)) << "config line has no value: '" << line << "'";
  std::string extra;
  TVX_CHECK(!(is >> extra)) << "config line has trailing tokens: '" << line << "'";
  kv_[key] = value;
}

void KeyValues::set(const std::string& key, const std::string& value) {
  kv_[key] = value;
}

bool KeyValues::has(const std::string& key) const { return kv_.count(key) > 0; }

std::string KeyValues::get_str(const std::string& key,
                               const std::string& dflt) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? dflt : it->second;
}

int64_t KeyValues::get_int(const std::string& key, int64_t dflt) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return dflt;
  try {
    return std::stoll(it->second);
  } catch (const std::exception&) {
    throw Error("config key " + key + " is not an integer: " + it->second);
  }
}

double KeyValues::get_double(const std::string& key, double dflt) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return dflt;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw Error("config key " + key + " is not a number: " + it->second);
  }
}

std::string KeyValues::serialize() const {
  std::ostringstream os;
  for (const auto& [k, v] : kv_) os << k << " " << v << "\n";
  return os.str();
}

PipelineConfig PipelineConfig::resolve(const KeyValues& kv) {
  static const std::set<std::string> known = {
      "dsp.sample_rate", "dsp.n_fft", "dsp.win_samples", "dsp.hop_samples",
      "dsp.n_mel", "dsp.fmin_hz", "dsp.fmax_hz", "dsp.clamp_floor",
      "dsp.f0_min_hz", "dsp.f0_max_hz", "dsp.voicing_threshold",
      "augment.n_freq_masks", "augment.max_mask_width",
      "units.vocab_size", "units.kmeans_max_iters", "units.kmeans_subsample",
      "units.kmeans_seed", "units.feature_source", "units.external_features_dir",
      "model.scale_divisor", "model.vocab_size", "model.prosody_dim",
      "model.unit_repr_dim", "model.init_seed",
      "train.batch_size", "train.warmup_steps", "train.initial_lr",
      "train.schedule", "train.fixed_lr", "train.grad_clip",
      "train.ss_start_prob", "train.ss_end_prob", "train.ss_decay_steps",
      "train.patience", "train.min_delta", "train.seed", "train.max_steps",
      "train.eval_every", "train.val_count", "train.stop_loss_weight",
      "train.stop_pos_weight",
      "run.dir", "run.seed", "run.griffin_lim_iters", "evc.pairs",
      "ser.mode", "ser.epochs", "ser.encoder_lr", "ser.head_lr",
      "ser.batch_size", "ser.cv_seed",
  };
  for (const auto& [k, v] : kv.entries())
    TVX_CHECK(known.count(k) == 1) << "unknown config key: " << k;

  PipelineConfig c;
  c.resolved = kv;

  c.dsp.sample_rate = int(kv.get_int("dsp.sample_rate", c.dsp.sample_rate));
  c.dsp.n_fft = int(kv.get_int("dsp.n_fft", c.dsp.n_fft));
  c.dsp.win_samples = int(kv.get_int("dsp.win_samples", c.dsp.win_samples));
  c.dsp.hop_samples = int(kv.get_int("dsp.hop_samples", c.dsp.hop_samples));
  c.dsp.n_mel = int(kv.get_int("dsp.n_mel", c.dsp.n_mel));
  c.dsp.fmin_hz = kv.get_double("dsp.fmin_hz", c.dsp.fmin_hz);
  c.dsp.fmax_hz = kv.get_double("dsp.fmax_hz", c.dsp.fmax_hz);
  c.dsp.clamp_floor = kv.get_double("dsp.clamp_floor", c.dsp.clamp_floor);
  c.dsp.f0_min_hz = kv.get_double("dsp.f0_min_hz", c.dsp.f0_min_hz);
  c.dsp.f0_max_hz = kv.get_double("dsp.f0_max_hz", c.dsp.f0_max_hz);
  c.dsp.voicing_threshold =
      kv.get_double("dsp.voicing_threshold", c.dsp.voicing_threshold);

  c.augment.n_freq_masks =
      int(kv.get_int("augment.n_freq_masks", c.augment.n_freq_masks));
  c.augment.max_mask_width =
      int(kv.get_int("augment.max_mask_width", c.augment.max_mask_width));

  c.unit_vocab_size = int(kv.get_int("units.vocab_size", c.unit_vocab_size));
  c.kmeans_max_iters =
      int(kv.get_int("units.kmeans_max_iters", c.kmeans_max_iters));
  c.kmeans_subsample = kv.get_int("units.kmeans_subsample", c.kmeans_subsample);
  c.kmeans_seed = uint64_t(kv.get_int("units.kmeans_seed", int64_t(c.kmeans_seed)));
  c.feature_source = kv.get_str("units.feature_source", c.feature_source);
  TVX_CHECK(c.feature_source == "mfcc" || c.feature_source == "external")
      << "units.feature_source must be mfcc or external";
  c.external_features_dir =
      kv.get_str("units.external_features_dir", c.external_features_dir);

  c.model_scale_divisor = int(kv.get_int("model.scale_divisor", 4));
  model::ModelConfig full;
  full.prosody_dim = int(kv.get_int("model.prosody_dim", full.prosody_dim));
  full.unit_repr_dim = int(kv.get_int("model.unit_repr_dim", full.unit_repr_dim));
  full.init_seed = uint64_t(kv.get_int("model.init_seed", int64_t(full.init_seed)));
  c.model = c.model_scale_divisor == 1 ? full : full.scaled(c.model_scale_divisor);
  c.model.vocab_size = int(kv.get_int("model.vocab_size", c.unit_vocab_size));

  c.train.batch_size = int(kv.get_int("train.batch_size", c.train.batch_size));
  c.train.warmup_steps = int(kv.get_int("train.warmup_steps", c.train.warmup_steps));
  c.train.initial_lr = kv.get_double("train.initial_lr", c.train.initial_lr);
  const std::string sched = kv.get_str("train.schedule", "cosine");
  TVX_CHECK(sched == "cosine" || sched == "fixed") << "train.schedule must be cosine or fixed";
  c.train.schedule = sched == "cosine" ? train::LrSchedule::kWarmupCosine
                                       : train::LrSchedule::kFixed;
  c.train.fixed_lr = kv.get_double("train.fixed_lr", c.train.fixed_lr);
  c.train.grad_clip = kv.get_double("train.grad_clip", c.train.grad_clip);
  c.train.ss_start_prob = kv.get_double("train.ss_start_prob", c.train.ss_start_prob);
  c.train.ss_end_prob = kv.get_double("train.ss_end_prob", c.train.ss_end_prob);
  c.train.ss_decay_steps = int(kv.get_int("train.ss_decay_steps", c.train.ss_decay_steps));
  c.train.patience = int(kv.get_int("train.patience", c.train.patience));
  c.train.min_delta = kv.get_double("train.min_delta", c.train.min_delta);
  c.train.seed = uint64_t(kv.get_int("train.seed", int64_t(c.train.seed)));
  c.train.max_steps = int(kv.get_int("train.max_steps", c.train.max_steps));
  c.train.eval_every = int(kv.get_int("train.eval_every", c.train.eval_every));
  c.train.val_count = int(kv.get_int("train.val_count", c.train.val_count));
  c.train.stop_loss_weight =
      kv.get_double("train.stop_loss_weight", c.train.stop_loss_weight);
  c.train.stop_pos_weight =
      kv.get_double("train.stop_pos_weight", c.train.stop_pos_weight);

  c.global_seed = uint64_t(kv.get_int("run.seed", int64_t(c.global_seed)));
  c.run_dir = kv.get_str("run.dir", c.run_dir);
  c.griffin_lim_iters = int(kv.get_int("run.griffin_lim_iters", c.griffin_lim_iters));
  c.evc_pairs = kv.get_str("evc.pairs", c.evc_pairs);

  c.ser_mode = kv.get_str("ser.mode", c.ser_mode);
  TVX_CHECK(c.ser_mode == "session" || c.ser_mode == "speaker")
      << "ser.mode must be session or speaker";
  c.ser_epochs = int(kv.get_int("ser.epochs", c.ser_epochs));
  c.ser_encoder_lr = kv.get_double("ser.encoder_lr", c.ser_encoder_lr);
  c.ser_head_lr = kv.get_double("ser.head_lr", c.ser_head_lr);
  c.ser_batch_size = int(kv.get_int("ser.batch_size", c.ser_batch_size));
  c.ser_cv_seed = uint64_t(kv.get_int("ser.cv_seed", int64_t(c.ser_cv_seed)));

  c.train.validate();
  c.model.validate();
  return c;
}

}  // namespace trivox::pipeline
