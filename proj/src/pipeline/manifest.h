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

#ifndef TRIVOX_PIPELINE_MANIFEST_H_
#define TRIVOX_PIPELINE_MANIFEST_H_

#include <optional>
#include <string>
#include <vector>

namespace trivox::pipeline {

// One corpus row: "utt_id|wav_path|speaker_id[|session_id[|raw_label[|language]]]"
struct ManifestRow {
  std::string utt_id;
  std::string wav_path;
  std::string speaker_id;
  std::string session_id;  // may be empty
  std::string raw_label;   // may be empty
  std::string language;    // may be empty
};

struct Manifest {
  std::string corpus_name;
  std::vector<ManifestRow> rows;

  const ManifestRow* find(const std::string& utt_id) const;
};

// Parses and validates. All problems are collected (duplicates with both
// line numbers, missing files, short rows); nothing fails on first error.
// `check_paths` disables filesystem checks for tests operating on synthetic
// ids.
Manifest load_manifest(const std::string& path, bool check_paths = true);

// Returns the full error list instead of throwing.
std::vector<std::string> validate_manifest(const std::string& path,
                                           bool check_paths = true);

void save_manifest(const std::string& path, const Manifest& m);

}  // namespace trivox::pipeline

#endif  // TRIVOX_PIPELINE_MANIFEST_H_
