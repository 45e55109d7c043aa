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

#include "pipeline/manifest.h"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "core/check.h"

namespace trivox::pipeline {

const ManifestRow* Manifest::find(const std::string& utt_id) const {
  for (const auto& r : rows)
    if (r.utt_id == utt_id) return &r;
  return nullptr;
}

namespace {
std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == '|') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::string> parse(const std::string& path, bool check_paths,
                               Manifest* out) {
  std::vector<std::string> errors;
  std::ifstream is(path);
  if (!is.good()) {
    errors.push_back("cannot open manifest: " + path);
    return errors;
  }
  std::map<std::string, int> first_line_of;
  std::string line;
  int lineno = 0, n_rows = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto f = split_fields(line);
    if (f.size() < 3 || f.size() > 6) {
      errors.push_back("line " + std::to_string(lineno) + ": expected 3-6 '|' fields, got " +
                       std::to_string(f.size()));
      continue;
    }
    ManifestRow row;
    row.utt_id = f[0];
    row.wav_path = f[1];
    row.speaker_id = f[2];
    if (f.size() > 3) row.session_id = f[3];
    if (f.size() > 4) row.raw_label = f[4];
    if (f.size() > 5) row.language = f[5];
    if (row.utt_id.empty())
      errors.push_back("line " + std::to_string(lineno) + ": empty utt_id");
    if (row.speaker_id.empty())
      errors.push_back("line " + std::to_string(lineno) + ": empty speaker_id");
    auto [it, inserted] = first_line_of.emplace(row.utt_id, lineno);
    if (!inserted)
      errors.push_back("duplicate utt_id '" + row.utt_id + "' on lines " +
                       std::to_string(it->second) + " and " +
                       std::to_string(lineno));
    if (check_paths && !std::filesystem::exists(row.wav_path))
      errors.push_back("line " + std::to_string(lineno) + ": missing file " +
                       row.wav_path);
    if (out != nullptr) out->rows.push_back(std::move(row));
    ++n_rows;
  }
  if (n_rows == 0) errors.push_back("empty manifest: " + path);
  return errors;
}
}  // namespace

std::vector<std::string> validate_manifest(const std::string& path,
                                           bool check_paths) {
  return parse(path, check_paths, nullptr);
}

Manifest load_manifest(const std::string& path, bool check_paths) {
  Manifest m;
  m.corpus_name = std::filesystem::path(path).stem().string();
  const auto errors = parse(path, check_paths, &m);
  if (!errors.empty()) {
    std::ostringstream os;
    os << "manifest " << path << " has " << errors.size() << " problem(s):";
    for (const auto& e : errors) os << "\n  " << e;
    throw Error(os.str());
  }
  return m;
}

void save_manifest(const std::string& path, const Manifest& m) {
  std::ofstream os(path);
  TVX_CHECK(os.good()) << "cannot write manifest: " << path;
  for (const auto& r : m.rows) {
    os << r.utt_id << "|" << r.wav_path << "|" << r.speaker_id;
    if (!r.session_id.empty() || !r.raw_label.empty() || !r.language.empty())
      os << "|" << r.session_id;
    if (!r.raw_label.empty() || !r.language.empty()) os << "|" << r.raw_label;
    if (!r.language.empty()) os << "|" << r.language;
    os << "\n";
  }
}

}  // namespace trivox::pipeline
