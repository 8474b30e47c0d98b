// include/tauwin/evalmetrics.h

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

#ifndef TAUWIN_EVALMETRICS_H_
#define TAUWIN_EVALMETRICS_H_

#include <filesystem>
#include <string>
#include <vector>

namespace tauwin {

enum class TrialLabel { kTarget, kImpostor };

struct Trial {
  std::string model_id;
  std::string test_id;
  TrialLabel label = TrialLabel::kImpostor;
};

struct TrialSet {
  std::vector<Trial> entries;
};

struct ScoreSet {
  std::vector<double> scores;  // aligned with TrialSet entries, finite
};

struct OperatingPoint {
  double threshold = 0.0;       // accept when score >= threshold
  double false_alarm_rate = 0.0;
  double miss_rate = 0.0;
};

// Operating points at every distinct score plus -inf and +inf, ordered by
// ascending threshold: false alarms never increase and misses never
// decrease along the sweep.
struct DetCurve {
  std::vector<OperatingPoint> points;
};

struct DcfParams {
  double c_miss = 10.0;
  double c_fa = 1.0;
  double p_target = 0.01;
  void validate() const;
};

DetCurve det_curve(const TrialSet& trials, const ScoreSet& scores);

// Rate where false alarms equal misses, in percent, interpolated linearly
// between the bracketing operating points on the convex hull of the curve.
double eer_percent(const DetCurve& curve);

// min over thresholds of c_miss p_target miss + c_fa (1 - p_target) fa.
double min_dcf(const TrialSet& trials, const ScoreSet& scores, const DcfParams& params);

// Standard normal quantile, clamped to [-5, 5] (so rates 0 and 1 stay
// plottable on probit axes).
double probit(double p);

// CSV: threshold,far,frr,probit_far,probit_frr
void export_det(const DetCurve& curve, const std::filesystem::path& path);

// Text lines "model_id<TAB>test_id<TAB>target|impostor".
TrialSet read_trials(const std::filesystem::path& path);
void write_trials(const TrialSet& trials, const std::filesystem::path& path);

// One floating-point score per line, aligned with the trial list.
ScoreSet read_scores(const std::filesystem::path& path);
void write_scores(const ScoreSet& scores, const std::filesystem::path& path);

}  // namespace tauwin

#endif  // TAUWIN_EVALMETRICS_H_
