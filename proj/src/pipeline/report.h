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

#ifndef TRIVOX_PIPELINE_REPORT_H_
#define TRIVOX_PIPELINE_REPORT_H_

#include <string>
#include <vector>

namespace trivox::pipeline {

// Collates run artifacts into <run_dir>/report/: summary.txt, copies of the
// training curve / confusion matrix / EVC scores / PCA traces / alignment
// CSVs, and a blank listening-test rating sheet for the conversions.
// Read-only over the source artifacts; missing ones are listed, not fatal.
struct ReportResult {
  std::vector<std::string> missing;
  std::string summary_path;
};

ReportResult emit_report(const std::string& run_dir);

}  // namespace trivox::pipeline

#endif  // TRIVOX_PIPELINE_REPORT_H_
