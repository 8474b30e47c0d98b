// include/tauwin/experiment.h

// Copyright 2026  The tauwin authors

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

#ifndef TAUWIN_EXPERIMENT_H_
#define TAUWIN_EXPERIMENT_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tauwin/corpus.h"
#include "tauwin/evalmetrics.h"
#include "tauwin/features.h"
#include "tauwin/gmm.h"

namespace tauwin {

// One verification system per window in `windows` (plus a sine-taper
// multitaper system when multitaper_tapers > 0), all sharing the exact
// same front end, UBM recipe, trials, and scoring.
struct ExperimentConfig {
  std::vector<WindowSpec> windows;
  int multitaper_tapers = 0;
  MfccConfig mfcc;  // window field is overridden per row
  int mixtures = 64;
  int em_iterations = 10;
  double relevance_factor = 14.0;
  int top_c = 5;
  DcfParams dcf;
  bool apply_zt_norm = false;
  std::uint64_t seed = 1;
  std::filesystem::path corpus_manifest;
  std::filesystem::path work_dir;
  void validate() const;  // throws ConfigError
};

struct ExperimentRow {
  std::string name;
  std::string window_digest;
  double eer_percent = 0.0;
  double min_dcf = 0.0;
  std::string det_csv;  // relative to work_dir
};

struct ExperimentReport {
  std::vector<ExperimentRow> rows;
  std::string frontend_digest;  // identical across rows by construction
  std::string model_digest;
  std::string eval_digest;
  std::size_t num_trials = 0;
  std::size_t num_target_trials = 0;
  std::string table_text;  // printable report, also written to reports/report.txt
};

ExperimentReport run_experiment(const ExperimentConfig& config);

}  // namespace tauwin

#endif  // TAUWIN_EXPERIMENT_H_
