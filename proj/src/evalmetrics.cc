// src/evalmetrics.cc

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

#include "tauwin/evalmetrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "tauwin/errors.h"

namespace tauwin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_aligned(const TrialSet& trials, const ScoreSet& scores) {
  if (trials.entries.size() != scores.scores.size())
    throw LengthMismatch("trial and score counts differ");
  if (trials.entries.empty()) throw EmptyData("empty trial set");
  bool has_target = false, has_impostor = false;
  for (const Trial& t : trials.entries) {
    if (t.label == TrialLabel::kTarget) has_target = true;
    else has_impostor = true;
  }
  if (!has_target || !has_impostor)
    throw SingleClassOnly("need at least one target and one impostor trial");
  for (double s : scores.scores)
    if (!std::isfinite(s)) throw ValidationError("scores must be finite");
}

}  // namespace

void DcfParams::validate() const {
  if (c_miss <= 0.0 || c_fa <= 0.0) throw ConfigError("DCF costs must be positive");
  if (!(p_target > 0.0 && p_target < 1.0)) throw ConfigError("p_target must be in (0,1)");
}

DetCurve det_curve(const TrialSet& trials, const ScoreSet& scores) {
  check_aligned(trials, scores);
  std::vector<double> target, impostor;
  for (std::size_t i = 0; i < trials.entries.size(); ++i) {
    if (trials.entries[i].label == TrialLabel::kTarget)
      target.push_back(scores.scores[i]);
    else
      impostor.push_back(scores.scores[i]);
  }
  std::sort(target.begin(), target.end());
  std::sort(impostor.begin(), impostor.end());

  std::vector<double> thresholds = scores.scores;
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  thresholds.insert(thresholds.begin(), -kInf);
  thresholds.push_back(kInf);

  const double nt = static_cast<double>(target.size());
  const double ni = static_cast<double>(impostor.size());
  DetCurve curve;
  curve.points.reserve(thresholds.size());
  for (double th : thresholds) {
    OperatingPoint p;
    p.threshold = th;
    if (th == kInf) {
      p.false_alarm_rate = 0.0;
      p.miss_rate = 1.0;
    } else {
      // accept when score >= th
      const auto imp_below = std::lower_bound(impostor.begin(), impostor.end(), th);
      p.false_alarm_rate = static_cast<double>(impostor.end() - imp_below) / ni;
      const auto tgt_below = std::lower_bound(target.begin(), target.end(), th);
      p.miss_rate = static_cast<double>(tgt_below - target.begin()) / nt;
    }
    curve.points.push_back(p);
  }
  return curve;
}

double eer_percent(const DetCurve& curve) {
  if (curve.points.empty()) throw EmptyData("empty DET curve");

  // Keep the best (lowest) miss at each false-alarm level, then take the
  // lower convex hull so the crossing interpolates between achievable
  // operating points rather than along the empirical staircase.
  std::vector<std::pair<double, double>> pts;  // (fa, miss), fa ascending
  for (const OperatingPoint& p : curve.points) pts.emplace_back(p.false_alarm_rate, p.miss_rate);
  std::sort(pts.begin(), pts.end());
  std::vector<std::pair<double, double>> frontier;
  for (const auto& p : pts) {
    if (!frontier.empty() && frontier.back().first == p.first) {
      frontier.back().second = std::min(frontier.back().second, p.second);
    } else {
      frontier.push_back(p);
    }
  }
  std::vector<std::pair<double, double>> hull;
  for (const auto& p : frontier) {
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull[hull.size() - 1];
      const double cross = (b.first - a.first) * (p.second - a.second) -
                           (b.second - a.second) * (p.first - a.first);
      if (cross <= 0.0)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(p);
  }

  // d = fa - miss increases along the hull; find the sign change.
  double prev_fa = hull.front().first, prev_miss = hull.front().second;
  for (const auto& [fa, miss] : hull) {
    const double d = fa - miss;
    if (d == 0.0) return 100.0 * fa;
    if (d > 0.0) {
      const double d0 = prev_fa - prev_miss;
      const double s = d0 / (d0 - d);
      return 100.0 * (prev_fa + s * (fa - prev_fa));
    }
    prev_fa = fa;
    prev_miss = miss;
  }
  // fa <= miss everywhere: the curve only touches the diagonal at (0, 0)
  // style corners; report the closest point.
  return 100.0 * hull.back().first;
}

double min_dcf(const TrialSet& trials, const ScoreSet& scores, const DcfParams& params) {
  params.validate();
  const DetCurve curve = det_curve(trials, scores);
  double best = kInf;
  for (const OperatingPoint& p : curve.points) {
    const double cost = params.c_miss * params.p_target * p.miss_rate +
                        params.c_fa * (1.0 - params.p_target) * p.false_alarm_rate;
    best = std::min(best, cost);
  }
  return best;
}

double probit(double p) {
  // Acklam's rational approximation to the standard normal quantile.
  if (p <= 0.0) return -5.0;
  if (p >= 1.0) return 5.0;
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  return std::clamp(x, -5.0, 5.0);
}

void export_det(const DetCurve& curve, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "threshold,far,frr,probit_far,probit_frr\n";
  char line[256];
  for (const OperatingPoint& p : curve.points) {
    std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g,%.17g,%.17g\n", p.threshold,
                  p.false_alarm_rate, p.miss_rate, probit(p.false_alarm_rate),
                  probit(p.miss_rate));
    out << line;
  }
  if (!out) throw IoError("write failed: " + path.string());
}

TrialSet read_trials(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  TrialSet trials;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    Trial t;
    std::string label;
    if (!std::getline(ss, t.model_id, '\t') || !std::getline(ss, t.test_id, '\t') ||
        !std::getline(ss, label, '\t'))
      throw FormatError("bad trial line " + std::to_string(lineno) + " in " + path.string());
    if (label == "target") t.label = TrialLabel::kTarget;
    else if (label == "impostor") t.label = TrialLabel::kImpostor;
    else throw FormatError("bad trial label '" + label + "' in " + path.string());
    trials.entries.push_back(std::move(t));
  }
  return trials;
}

void write_trials(const TrialSet& trials, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  for (const Trial& t : trials.entries)
    out << t.model_id << '\t' << t.test_id << '\t'
        << (t.label == TrialLabel::kTarget ? "target" : "impostor") << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

ScoreSet read_scores(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  ScoreSet scores;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      scores.scores.push_back(std::stod(line));
    } catch (const std::exception&) {
      throw FormatError("bad score line in " + path.string());
    }
  }
  return scores;
}

void write_scores(const ScoreSet& scores, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  char buf[64];
  for (double s : scores.scores) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", s);
    out << buf;
  }
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace tauwin
