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

#include "pipeline/report.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/check.h"

namespace trivox::pipeline {

namespace fs = std::filesystem;

namespace {
bool copy_if_exists(const std::string& src, const std::string& dst,
                    std::vector<std::string>* missing) {
  if (!fs::exists(src)) {
    missing->push_back(src);
    return false;
  }
  fs::copy_file(src, dst, fs::copy_options::overwrite_existing);
  return true;
}

std::string last_line(const std::string& path) {
  std::ifstream is(path);
  std::string line, last;
  while (std::getline(is, line))
    if (!line.empty()) last = line;
  return last;
}
}  // namespace

ReportResult emit_report(const std::string& run_dir) {
  TVX_CHECK(fs::exists(run_dir)) << "run directory does not exist: " << run_dir;
  const std::string rdir = run_dir + "/report";
  fs::create_directories(rdir);

  ReportResult res;
  std::ostringstream summary;
  summary << "run " << run_dir << "\n";

  if (copy_if_exists(run_dir + "/pretrain/curve.csv", rdir + "/train_curve.csv",
                     &res.missing))
    summary << "pretrain last curve row: "
            << last_line(run_dir + "/pretrain/curve.csv") << "\n";
  if (copy_if_exists(run_dir + "/finetune-evc/curve.csv",
                     rdir + "/evc_finetune_curve.csv", &res.missing))
    summary << "evc fine-tune last curve row: "
            << last_line(run_dir + "/finetune-evc/curve.csv") << "\n";
  if (copy_if_exists(run_dir + "/finetune-ser/confusion.csv",
                     rdir + "/ser_confusion.csv", &res.missing)) {
    std::ifstream rep(run_dir + "/finetune-ser/report.txt");
    std::string line;
    while (std::getline(rep, line))
      if (line.rfind("wa ", 0) == 0 || line.rfind("ua ", 0) == 0)
        summary << "ser " << line << "\n";
  }
  if (copy_if_exists(run_dir + "/evaluate/evc_scores.csv",
                     rdir + "/evc_scores.csv", &res.missing))
    summary << "evc " << last_line(run_dir + "/evaluate/evc_scores.csv") << "\n";
  if (copy_if_exists(run_dir + "/export-embeddings/pca_trace.csv",
                     rdir + "/pca_trace.csv", &res.missing)) {
  }
  if (fs::exists(run_dir + "/probe/speaker_probe.txt"))
    summary << last_line(run_dir + "/probe/speaker_probe.txt") << "\n";

  // Alignment matrices from the conversion stage.
  if (fs::exists(run_dir + "/convert")) {
    for (const auto& e : fs::directory_iterator(run_dir + "/convert"))
      if (e.path().string().ends_with(".align.csv"))
        fs::copy_file(e.path(), rdir + "/" + e.path().filename().string(),
                      fs::copy_options::overwrite_existing);
    // Blank rating sheet for listening tests over the converted audio.
    std::ifstream conv(run_dir + "/convert/conversions.csv");
    if (conv.good()) {
      std::ofstream sheet(rdir + "/rating_sheet.csv");
      sheet << "conversion_id,source,prosody_ref,similarity_-2..2,"
               "naturalness_1..5\n";
      std::string line;
      std::getline(conv, line);  // header
      while (std::getline(conv, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cid, src, ref;
        std::getline(ls, cid, ',');
        std::getline(ls, src, ',');
        std::getline(ls, ref, ',');
        sheet << cid << "," << src << "," << ref << ",,\n";
      }
    }
  } else {
    res.missing.push_back(run_dir + "/convert");
  }

  if (!res.missing.empty()) {
    summary << "missing artifacts:\n";
    for (const auto& m : res.missing) summary << "  " << m << "\n";
  }
  res.summary_path = rdir + "/summary.txt";
  std::ofstream os(res.summary_path);
  TVX_CHECK(os.good()) << "cannot write " << res.summary_path;
  os << summary.str();
  return res;
}

}  // namespace trivox::pipeline
