// tests/test_evalmetrics.cc

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "tauwin/errors.h"
#include "tauwin/evalmetrics.h"
#include "tauwin/util.h"

using namespace tauwin;

namespace {

TrialSet make_trials(const std::vector<int>& labels) {
  TrialSet t;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    Trial tr;
    tr.model_id = "m";
    tr.test_id = "t" + std::to_string(i);
    tr.label = labels[i] ? TrialLabel::kTarget : TrialLabel::kImpostor;
    t.entries.push_back(tr);
  }
  return t;
}

struct OraclePoint {
  double fa, miss;
};

// Quadratic-time enumeration of every achievable operating point.
std::vector<OraclePoint> oracle_points(const std::vector<int>& labels,
                                       const std::vector<double>& scores) {
  std::vector<double> thresholds = scores;
  thresholds.push_back(-std::numeric_limits<double>::infinity());
  thresholds.push_back(std::numeric_limits<double>::infinity());
  std::vector<OraclePoint> points;
  for (double th : thresholds) {
    int fa = 0, miss = 0, nt = 0, ni = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (labels[i]) {
        ++nt;
        if (scores[i] < th) ++miss;
      } else {
        ++ni;
        if (scores[i] >= th) ++fa;
      }
    }
    points.push_back({static_cast<double>(fa) / ni, static_cast<double>(miss) / nt});
  }
  return points;
}

// Smallest diagonal crossing over single points and every mixed-sign pair
// of achievable points; equals the hull crossing.
double oracle_eer_percent(const std::vector<int>& labels, const std::vector<double>& scores) {
  const auto points = oracle_points(labels, scores);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : points)
    if (p.fa == p.miss) best = std::min(best, p.fa);
  for (const auto& a : points)
    for (const auto& b : points) {
      const double da = a.fa - a.miss;
      const double db = b.fa - b.miss;
      if (da > 0.0 && db < 0.0) {
        const double s = da / (da - db);
        best = std::min(best, a.fa + s * (b.fa - a.fa));
      }
    }
  return 100.0 * best;
}

double oracle_min_dcf(const std::vector<int>& labels, const std::vector<double>& scores,
                      const DcfParams& params) {
  const auto points = oracle_points(labels, scores);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : points)
    best = std::min(best, params.c_miss * params.p_target * p.miss +
                              params.c_fa * (1.0 - params.p_target) * p.fa);
  return best;
}

}  // namespace

TEST_CASE("four-trial example, worked by hand") {
  const std::vector<int> labels{1, 1, 0, 0};
  const std::vector<double> values{2.0, 3.0, 1.0, 2.5};
  const TrialSet trials = make_trials(labels);
  const ScoreSet scores{values};

  const DetCurve curve = det_curve(trials, scores);
  // Just above 2.5 (threshold 3 on the grid): no false alarms, one miss.
  bool found = false;
  for (const auto& p : curve.points)
    if (p.false_alarm_rate == 0.0 && p.miss_rate == 0.5) found = true;
  CHECK(found);

  CHECK(eer_percent(curve) == doctest::Approx(25.0).epsilon(1e-12));
  CHECK(oracle_eer_percent(labels, values) == doctest::Approx(25.0).epsilon(1e-12));

  const DcfParams params;
  const double dcf = min_dcf(trials, scores, params);
  CHECK(dcf == oracle_min_dcf(labels, values, params));
  CHECK(dcf == doctest::Approx(0.05).epsilon(1e-12));  // miss half the targets
}

TEST_CASE("perfect separation") {
  const std::vector<int> labels{1, 1, 0, 0};
  const std::vector<double> values{1.0, 0.9, 0.1, 0.0};
  const TrialSet trials = make_trials(labels);
  const ScoreSet scores{values};
  const DetCurve curve = det_curve(trials, scores);
  bool corner = false;
  for (const auto& p : curve.points)
    if (p.false_alarm_rate == 0.0 && p.miss_rate == 0.0) corner = true;
  CHECK(corner);
  CHECK(eer_percent(curve) == 0.0);
  CHECK(min_dcf(trials, scores, DcfParams{}) == 0.0);
}

TEST_CASE("identical scores leave only the corners") {
  const std::vector<int> labels{1, 0, 1, 0};
  const std::vector<double> values{0.5, 0.5, 0.5, 0.5};
  const DetCurve curve = det_curve(make_trials(labels), ScoreSet{values});
  REQUIRE(curve.points.size() == 3);  // -inf, 0.5, +inf
  CHECK(curve.points[0].false_alarm_rate == 1.0);
  CHECK(curve.points[0].miss_rate == 0.0);
  CHECK(curve.points[1].false_alarm_rate == 1.0);
  CHECK(curve.points[1].miss_rate == 0.0);
  CHECK(curve.points[2].false_alarm_rate == 0.0);
  CHECK(curve.points[2].miss_rate == 1.0);
  CHECK(eer_percent(curve) == doctest::Approx(50.0));
}

TEST_CASE("curve rates are monotone in the threshold") {
  Rng rng(31);
  std::vector<int> labels;
  std::vector<double> values;
  for (int i = 0; i < 400; ++i) {
    labels.push_back(rng.uniform() < 0.3 ? 1 : 0);
    values.push_back(std::round(rng.gaussian() * 4.0) / 2.0);  // plenty of ties
  }
  labels[0] = 1;
  labels[1] = 0;
  const DetCurve curve = det_curve(make_trials(labels), ScoreSet{values});
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    CHECK(curve.points[i].threshold > curve.points[i - 1].threshold);
    CHECK(curve.points[i].false_alarm_rate <= curve.points[i - 1].false_alarm_rate);
    CHECK(curve.points[i].miss_rate >= curve.points[i - 1].miss_rate);
  }
}

TEST_CASE("implementation matches the brute-force oracle on random sets") {
  Rng rng(32);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform() * 300);
    std::vector<int> labels(n);
    std::vector<double> values(n);
    for (int i = 0; i < n; ++i) {
      labels[i] = rng.uniform() < 0.4 ? 1 : 0;
      values[i] = rng.uniform() < 0.5 ? rng.gaussian()
                                      : std::round(rng.gaussian() * 3.0) / 2.0;
      if (labels[i]) values[i] += 0.8;
    }
    labels[0] = 1;
    labels[n - 1] = 0;
    const TrialSet trials = make_trials(labels);
    const ScoreSet scores{values};
    CHECK(std::abs(eer_percent(det_curve(trials, scores)) -
                   oracle_eer_percent(labels, values)) <= 1e-9);
    const DcfParams params;
    CHECK(min_dcf(trials, scores, params) == oracle_min_dcf(labels, values, params));
  }
}

TEST_CASE("strictly increasing score transforms change nothing") {
  Rng rng(33);
  std::vector<int> labels;
  std::vector<double> values;
  for (int i = 0; i < 300; ++i) {
    labels.push_back(i % 3 == 0 ? 1 : 0);
    values.push_back(rng.gaussian() + (labels.back() ? 1.0 : 0.0));
  }
  const TrialSet trials = make_trials(labels);
  const ScoreSet raw{values};
  const double eer0 = eer_percent(det_curve(trials, raw));
  const double dcf0 = min_dcf(trials, raw, DcfParams{});

  const auto op_set = [&](const ScoreSet& s) {
    std::set<std::pair<double, double>> out;
    for (const auto& p : det_curve(trials, s).points)
      out.emplace(p.false_alarm_rate, p.miss_rate);
    return out;
  };
  const auto base_set = op_set(raw);

  const std::vector<std::function<double(double)>> transforms{
      [](double x) { return 3.0 * x + 11.0; },
      [](double x) { return x * x * x; },
      [](double x) { return std::atan(x); },
  };
  for (const auto& f : transforms) {
    ScoreSet mapped;
    for (double v : values) mapped.scores.push_back(f(v));
    CHECK(eer_percent(det_curve(trials, mapped)) == doctest::Approx(eer0).epsilon(1e-12));
    CHECK(min_dcf(trials, mapped, DcfParams{}) == doctest::Approx(dcf0).epsilon(1e-12));
    CHECK(op_set(mapped) == base_set);
  }
}

TEST_CASE("chance-level scores give a 50 percent EER") {
  Rng rng(34);
  std::vector<int> labels;
  std::vector<double> values;
  for (int i = 0; i < 10000; ++i) {
    labels.push_back(i % 2);
    values.push_back(rng.gaussian());  // same distribution for both classes
  }
  const double eer = eer_percent(det_curve(make_trials(labels), ScoreSet{values}));
  CHECK(eer > 48.0);
  CHECK(eer < 52.0);
}

TEST_CASE("minDCF never beats the trivial deciders") {
  Rng rng(35);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> labels;
    std::vector<double> values;
    for (int i = 0; i < 100; ++i) {
      labels.push_back(i % 4 == 0 ? 1 : 0);
      values.push_back(rng.gaussian());
    }
    const DcfParams params{10.0, 1.0, 0.01};
    const double dcf = min_dcf(make_trials(labels), ScoreSet{values}, params);
    CHECK(dcf <= std::min(params.c_miss * params.p_target,
                          params.c_fa * (1.0 - params.p_target)) + 1e-12);
  }
}

TEST_CASE("probit basics") {
  CHECK(probit(0.5) == 0.0);
  CHECK(probit(0.0) == -5.0);
  CHECK(probit(1.0) == 5.0);
  CHECK(probit(0.975) == doctest::Approx(1.959964).epsilon(1e-5));
  CHECK(probit(0.025) == doctest::Approx(-1.959964).epsilon(1e-5));
}

TEST_CASE("DET export round trips") {
  const std::vector<int> labels{1, 1, 0, 0, 1, 0};
  const std::vector<double> values{2.0, 3.0, 1.0, 2.5, 0.5, 0.25};
  const DetCurve curve = det_curve(make_trials(labels), ScoreSet{values});
  const auto path = std::filesystem::temp_directory_path() / "tauwin_test_det.csv";
  export_det(curve, path);

  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "threshold,far,frr,probit_far,probit_frr");
  std::size_t row = 0;
  std::string line;
  while (std::getline(in, line)) {
    REQUIRE(row < curve.points.size());
    double th, far, frr, pfar, pfrr;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf", &th, &far, &frr, &pfar, &pfrr) == 5);
    CHECK(far == curve.points[row].false_alarm_rate);
    CHECK(frr == curve.points[row].miss_rate);
    CHECK(pfar == probit(far));
    if (far == 0.0) CHECK(pfar == -5.0);
    if (far == 0.5) CHECK(pfar == 0.0);
    ++row;
  }
  CHECK(row == curve.points.size());
  std::filesystem::remove(path);
}

TEST_CASE("trial and score files round trip") {
  const std::vector<int> labels{1, 0, 0};
  const std::vector<double> values{0.25, -1.5, 3.75};
  const TrialSet trials = make_trials(labels);
  const auto tpath = std::filesystem::temp_directory_path() / "tauwin_test_trials.tsv";
  const auto spath = std::filesystem::temp_directory_path() / "tauwin_test_scores.txt";
  write_trials(trials, tpath);
  write_scores(ScoreSet{values}, spath);
  const TrialSet t2 = read_trials(tpath);
  const ScoreSet s2 = read_scores(spath);
  REQUIRE(t2.entries.size() == 3);
  CHECK(t2.entries[0].label == TrialLabel::kTarget);
  CHECK(t2.entries[1].test_id == "t1");
  CHECK(s2.scores == values);
  std::filesystem::remove(tpath);
  std::filesystem::remove(spath);
}

TEST_CASE("alignment and class checks") {
  const TrialSet trials = make_trials({1, 0});
  CHECK_THROWS_AS(det_curve(trials, ScoreSet{{1.0}}), LengthMismatch);
  const TrialSet one_class = make_trials({1, 1});
  CHECK_THROWS_AS(det_curve(one_class, ScoreSet{{1.0, 2.0}}), SingleClassOnly);
  CHECK_THROWS_AS(min_dcf(one_class, ScoreSet{{1.0, 2.0}}, DcfParams{}), SingleClassOnly);
  DcfParams bad;
  bad.p_target = 1.5;
  CHECK_THROWS_AS(min_dcf(trials, ScoreSet{{1.0, 0.0}}, bad), ConfigError);
}
