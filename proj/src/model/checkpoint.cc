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

#include "model/checkpoint.h"

#include <cstdint>

#include "core/binio.h"
#include "core/check.h"

namespace trivox::model {

namespace {
constexpr uint32_t kFormatVersion = 1;

void write_string(std::ostream& os, const std::string& s) {
  binio::write_pod<uint32_t>(os, uint32_t(s.size()));
  os.write(s.data(), std::streamsize(s.size()));
}

std::string read_string(std::istream& is, const char* what) {
  const auto n = binio::read_pod<uint32_t>(is, what);
  std::string s(n, '\0');
  binio::read_array(is, s.data(), n, what);
  return s;
}

void write_tensor(std::ostream& os, const TensorF& t) {
  binio::write_pod<uint32_t>(os, uint32_t(t.rows));
  binio::write_pod<uint32_t>(os, uint32_t(t.cols));
  binio::write_array(os, t.data(), size_t(t.size()));
}

TensorF read_tensor(std::istream& is, const char* what) {
  const auto rows = binio::read_pod<uint32_t>(is, what);
  const auto cols = binio::read_pod<uint32_t>(is, what);
  TensorF t(static_cast<int>(rows), static_cast<int>(cols));
  binio::read_array(is, t.data(), size_t(t.size()), what);
  return t;
}
}  // namespace

void save_checkpoint(const std::string& path, const Reconstructor<float>& m,
                     const TrainerState* state) {
  auto os = binio::open_out(path);
  binio::write_magic(os, "PCKP");
  binio::write_pod<uint32_t>(os, kFormatVersion);
  write_string(os, m.cfg().serialize());

  const TrainerState empty;
  const TrainerState& st = state != nullptr ? *state : empty;
  binio::write_pod<uint64_t>(os, st.global_step);
  for (uint64_t w : st.rng_state) binio::write_pod<uint64_t>(os, w);
  binio::write_pod<uint32_t>(os, uint32_t(st.extras.size()));
  for (const auto& [k, v] : st.extras) {
    write_string(os, k);
    binio::write_pod<double>(os, v);
  }

  const auto& params = m.params().all();
  binio::write_pod<uint32_t>(os, uint32_t(params.size()));
  for (const auto& p : params) {
    write_string(os, p->name);
    binio::write_pod<uint8_t>(os, p->trainable ? 1 : 0);
    write_tensor(os, p->value);
  }

  binio::write_pod<uint8_t>(os, st.has_optimizer ? 1 : 0);
  if (st.has_optimizer) {
    TVX_CHECK(st.adam_m.size() == params.size() &&
              st.adam_v.size() == params.size())
        << "optimizer state does not match parameter list";
    binio::write_pod<uint64_t>(os, st.adam_t);
    for (size_t i = 0; i < params.size(); ++i) {
      write_tensor(os, st.adam_m[i]);
      write_tensor(os, st.adam_v[i]);
    }
  }
}

namespace {
void load_body(std::istream& is, const std::string& path, Reconstructor<float>& m,
               TrainerState* state, uint64_t step,
               const std::array<uint64_t, 4>& rng,
               std::map<std::string, double> extras) {
  const auto n_tensors = binio::read_pod<uint32_t>(is, "tensor count");
  TVX_CHECK(n_tensors == m.params().all().size())
      << path << ": has " << n_tensors << " tensors, model expects "
      << m.params().all().size();
  for (uint32_t i = 0; i < n_tensors; ++i) {
    const std::string name = read_string(is, "tensor name");
    const auto trainable = binio::read_pod<uint8_t>(is, "trainable flag");
    TensorF t = read_tensor(is, name.c_str());
    auto* p = m.params().find(name);
    TVX_CHECK(p != nullptr) << path << ": unknown parameter " << name;
    TVX_CHECK(p->value.rows == t.rows && p->value.cols == t.cols)
        << path << ": shape mismatch for " << name;
    p->value = std::move(t);
    p->trainable = trainable != 0;
  }
  const auto has_opt = binio::read_pod<uint8_t>(is, "optimizer flag");
  if (state != nullptr) {
    state->global_step = step;
    state->rng_state = rng;
    state->extras = std::move(extras);
    state->has_optimizer = has_opt != 0;
    state->adam_m.clear();
    state->adam_v.clear();
    if (has_opt != 0) {
      state->adam_t = binio::read_pod<uint64_t>(is, "adam step");
      for (uint32_t i = 0; i < n_tensors; ++i) {
        state->adam_m.push_back(read_tensor(is, "adam m"));
        state->adam_v.push_back(read_tensor(is, "adam v"));
      }
    }
  }
}

std::tuple<std::string, uint64_t, std::array<uint64_t, 4>,
           std::map<std::string, double>>
read_header(std::istream& is, const std::string& path) {
  binio::expect_magic(is, "PCKP", path);
  const auto version = binio::read_pod<uint32_t>(is, "format version");
  TVX_CHECK(version == kFormatVersion)
      << path << ": unsupported checkpoint version " << version;
  std::string cfg_text = read_string(is, "model config");
  const auto step = binio::read_pod<uint64_t>(is, "global step");
  std::array<uint64_t, 4> rng{};
  for (auto& w : rng) w = binio::read_pod<uint64_t>(is, "rng state");
  const auto n_extras = binio::read_pod<uint32_t>(is, "extras count");
  std::map<std::string, double> extras;
  for (uint32_t i = 0; i < n_extras; ++i) {
    std::string k = read_string(is, "extra key");
    extras[k] = binio::read_pod<double>(is, "extra value");
  }
  return {std::move(cfg_text), step, rng, std::move(extras)};
}
}  // namespace

std::unique_ptr<Reconstructor<float>> load_checkpoint(const std::string& path,
                                                      TrainerState* state) {
  auto is = binio::open_in(path);
  auto [cfg_text, step, rng, extras] = read_header(is, path);
  auto m = std::make_unique<Reconstructor<float>>(
      ModelConfig::deserialize(cfg_text));
  load_body(is, path, *m, state, step, rng, std::move(extras));
  return m;
}

void load_params_into(const std::string& path, Reconstructor<float>& m) {
  auto is = binio::open_in(path);
  auto [cfg_text, step, rng, extras] = read_header(is, path);
  TVX_CHECK(cfg_text == m.cfg().serialize())
      << path << ": checkpoint config does not match the target model";
  load_body(is, path, m, nullptr, step, rng, std::move(extras));
}

}  // namespace trivox::model
