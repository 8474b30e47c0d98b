// tests/test_gmm.cc

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

#include "tauwin/errors.h"
#include "tauwin/gmm.h"
#include "tauwin/util.h"

using namespace tauwin;

namespace {

FeatureSet gaussian_blob(std::size_t n, std::vector<double> center, double sigma,
                         std::uint64_t idx) {
  Rng rng = Rng::substream(4242, 9, idx);
  FeatureSet fs;
  fs.dim = static_cast<int>(center.size());
  fs.data.reserve(n * center.size());
  for (std::size_t t = 0; t < n; ++t)
    for (double c : center) fs.data.push_back(c + sigma * rng.gaussian());
  return fs;
}

FeatureSet concat(const FeatureSet& a, const FeatureSet& b) {
  FeatureSet out = a;
  out.data.insert(out.data.end(), b.data.begin(), b.data.end());
  return out;
}

// Full log-likelihood-ratio oracle (all mixtures, plain summation in the
// probability domain via logs).
double full_llr(const GmmModel& target, const GmmModel& ubm, const FeatureSet& feats) {
  const auto log_mix = [](const GmmModel& m, std::span<const double> x) {
    std::vector<double> lj(m.num_mixtures);
    for (int j = 0; j < m.num_mixtures; ++j) {
      double acc = std::log(m.weights[j]);
      for (int d = 0; d < m.dim; ++d) {
        const double var = m.variances[static_cast<std::size_t>(j) * m.dim + d];
        const double diff = x[d] - m.means[static_cast<std::size_t>(j) * m.dim + d];
        acc += -0.5 * (std::log(2.0 * M_PI * var) + diff * diff / var);
      }
      lj[j] = acc;
    }
    return logsumexp(lj);
  };
  double total = 0.0;
  for (std::size_t t = 0; t < feats.num_frames(); ++t)
    total += log_mix(target, feats.frame(t)) - log_mix(ubm, feats.frame(t));
  return total / static_cast<double>(feats.num_frames());
}

}  // namespace

TEST_CASE("vq with one mixture is the global gaussian") {
  const FeatureSet fs = gaussian_blob(500, {1.5, -2.0}, 0.7, 0);
  const GmmModel m = vq_init(fs, 1, 7);
  REQUIRE(m.num_mixtures == 1);
  CHECK(m.weights[0] == 1.0);

  std::vector<double> mean0(2, 0.0), var0(2, 0.0);
  for (std::size_t t = 0; t < fs.num_frames(); ++t)
    for (int d = 0; d < 2; ++d) mean0[d] += fs.frame(t)[d];
  for (int d = 0; d < 2; ++d) mean0[d] /= 500.0;
  for (std::size_t t = 0; t < fs.num_frames(); ++t)
    for (int d = 0; d < 2; ++d) {
      const double diff = fs.frame(t)[d] - mean0[d];
      var0[d] += diff * diff / 500.0;
    }
  for (int d = 0; d < 2; ++d) {
    CHECK(m.means[d] == doctest::Approx(mean0[d]).epsilon(1e-9));
    CHECK(m.variances[d] == doctest::Approx(var0[d]).epsilon(1e-6));
  }
}

TEST_CASE("vq separates two point clouds") {
  const FeatureSet a = gaussian_blob(600, {0.0, 0.0, 0.0}, 1.0, 1);
  const FeatureSet b = gaussian_blob(600, {10.0, 10.0, 10.0}, 1.0, 2);
  const GmmModel m = vq_init(concat(a, b), 2, 11);
  // One centroid within 0.1 sigma of each true mean.
  int near_zero = -1;
  for (int j = 0; j < 2; ++j)
    if (std::abs(m.means[static_cast<std::size_t>(j) * 3]) < 1.0) near_zero = j;
  REQUIRE(near_zero >= 0);
  const int near_ten = 1 - near_zero;
  for (int d = 0; d < 3; ++d) {
    CHECK(std::abs(m.means[static_cast<std::size_t>(near_zero) * 3 + d] - 0.0) < 0.1);
    CHECK(std::abs(m.means[static_cast<std::size_t>(near_ten) * 3 + d] - 10.0) < 0.1);
  }
  CHECK(m.weights[0] == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("vq input validation") {
  const FeatureSet tiny = gaussian_blob(3, {0.0}, 1.0, 3);
  CHECK_THROWS_AS(vq_init(tiny, 4, 1), InsufficientData);
  const FeatureSet fs = gaussian_blob(100, {0.0}, 1.0, 4);
  CHECK_THROWS_AS(vq_init(fs, 3, 1), NotPowerOfTwo);
  CHECK_THROWS_AS(vq_init(FeatureSet{}, 1, 1), EmptyData);
}

TEST_CASE("vq is reproducible from its seed") {
  const FeatureSet fs = concat(gaussian_blob(400, {0.0, 0.0}, 1.0, 5),
                               gaussian_blob(400, {5.0, -4.0}, 1.5, 6));
  const GmmModel a = vq_init(fs, 4, 123);
  const GmmModel b = vq_init(fs, 4, 123);
  CHECK(a.means == b.means);
  CHECK(a.variances == b.variances);
  CHECK(a.weights == b.weights);
}

TEST_CASE("EM raises the average log-likelihood every iteration") {
  for (std::uint64_t trial = 0; trial < 5; ++trial) {
    const FeatureSet fs = concat(gaussian_blob(400, {0.0, 1.0}, 1.0, 20 + trial),
                                 gaussian_blob(300, {4.0, -2.0}, 0.5, 40 + trial));
    std::vector<double> ll;
    em_train(vq_init(fs, 4, trial), fs, 8, 1e-3, &ll);
    REQUIRE(ll.size() == 8);
    for (std::size_t i = 1; i < ll.size(); ++i) CHECK(ll[i] >= ll[i - 1] - 1e-8);
  }
}

TEST_CASE("EM with one mixture closes in a single iteration") {
  const FeatureSet fs = gaussian_blob(2000, {3.0}, 2.0, 50);
  const GmmModel init = vq_init(fs, 1, 1);
  const GmmModel m = em_train(init, fs, 1);
  double mean0 = 0.0, var0 = 0.0;
  for (std::size_t t = 0; t < fs.num_frames(); ++t) mean0 += fs.frame(t)[0];
  mean0 /= 2000.0;
  for (std::size_t t = 0; t < fs.num_frames(); ++t) {
    const double diff = fs.frame(t)[0] - mean0;
    var0 += diff * diff / 2000.0;
  }
  CHECK(m.means[0] == doctest::Approx(mean0).epsilon(1e-12));
  CHECK(m.variances[0] == doctest::Approx(var0).epsilon(1e-9));
}

TEST_CASE("EM recovers a two-component mixture") {
  const FeatureSet fs =
      concat(gaussian_blob(5000, {-3.0}, 1.0, 60), gaussian_blob(5000, {3.0}, 1.0, 61));
  const GmmModel m = em_train(vq_init(fs, 2, 5), fs, 20);
  const int lo = m.means[0] < m.means[1] ? 0 : 1;
  CHECK(std::abs(m.means[lo] - (-3.0)) < 0.1);
  CHECK(std::abs(m.means[1 - lo] - 3.0) < 0.1);
  CHECK(std::abs(m.weights[0] - 0.5) < 0.05);
  CHECK(std::abs(m.variances[0] - 1.0) < 0.15);
}

TEST_CASE("EM results do not depend on the worker count") {
  const FeatureSet fs = concat(gaussian_blob(6000, {0.0, 0.0}, 1.0, 70),
                               gaussian_blob(6000, {4.0, 4.0}, 1.0, 71));
  set_parallelism(1);
  const GmmModel serial = em_train(vq_init(fs, 4, 9), fs, 5);
  set_parallelism(4);
  const GmmModel parallel = em_train(vq_init(fs, 4, 9), fs, 5);
  set_parallelism(0);
  REQUIRE(serial.means.size() == parallel.means.size());
  for (std::size_t i = 0; i < serial.means.size(); ++i) {
    CHECK(std::abs(serial.means[i] - parallel.means[i]) <= 1e-10);
    CHECK(std::abs(serial.variances[i] - parallel.variances[i]) <= 1e-10);
  }
  for (int j = 0; j < 4; ++j) CHECK(std::abs(serial.weights[j] - parallel.weights[j]) <= 1e-10);
}

TEST_CASE("MAP with no data returns the UBM untouched") {
  const FeatureSet fs = gaussian_blob(500, {0.0, 0.0}, 1.0, 80);
  const GmmModel ubm = em_train(vq_init(fs, 2, 3), fs, 5);
  const GmmModel adapted = map_adapt(ubm, FeatureSet{}, AdaptationConfig{});
  CHECK(adapted.means == ubm.means);
  CHECK(adapted.variances == ubm.variances);
  CHECK(adapted.weights == ubm.weights);
}

TEST_CASE("MAP blend is exactly half at n equal to the relevance factor") {
  GmmModel ubm;
  ubm.num_mixtures = 2;
  ubm.dim = 1;
  ubm.weights = {0.5, 0.5};
  ubm.means = {0.0, 1000.0};
  ubm.variances = {1.0, 1.0};

  FeatureSet fs;
  fs.dim = 1;
  fs.data.assign(14, 2.0);  // all mass lands on mixture 0, n_0 = 14 exactly

  const GmmModel adapted = map_adapt(ubm, fs, AdaptationConfig{14.0, true});
  CHECK(adapted.means[0] == 1.0);  // alpha = 0.5, midpoint of 2 and 0
  CHECK(adapted.means[1] == 1000.0);
  CHECK(adapted.weights == ubm.weights);
  CHECK(adapted.variances == ubm.variances);
}

TEST_CASE("MAP approaches the data mean for large counts") {
  GmmModel ubm;
  ubm.num_mixtures = 2;
  ubm.dim = 1;
  ubm.weights = {0.5, 0.5};
  ubm.means = {0.0, 1000.0};
  ubm.variances = {1.0, 1.0};

  const FeatureSet fs = gaussian_blob(20000, {2.0}, 1.0, 90);
  double sample_mean = 0.0;
  for (std::size_t t = 0; t < fs.num_frames(); ++t) sample_mean += fs.frame(t)[0];
  sample_mean /= static_cast<double>(fs.num_frames());

  const GmmModel adapted = map_adapt(ubm, fs, AdaptationConfig{14.0, true});
  CHECK(std::abs(adapted.means[0] - sample_mean) < 0.01);  // within 0.01 sigma
}

TEST_CASE("an enormous relevance factor freezes the UBM") {
  const FeatureSet train = gaussian_blob(2000, {0.0, 0.0}, 1.0, 100);
  const GmmModel ubm = em_train(vq_init(train, 4, 3), train, 5);
  const FeatureSet adapt_data = gaussian_blob(100, {3.0, -3.0}, 1.0, 101);
  const GmmModel adapted = map_adapt(ubm, adapt_data, AdaptationConfig{1e9, true});
  for (std::size_t i = 0; i < ubm.means.size(); ++i) {
    const double sigma = std::sqrt(ubm.variances[i]);
    CHECK(std::abs(adapted.means[i] - ubm.means[i]) < 1e-6 * sigma);
  }
}

TEST_CASE("full MAP keeps the model well formed") {
  const FeatureSet train = gaussian_blob(2000, {0.0, 0.0}, 1.0, 102);
  const GmmModel ubm = em_train(vq_init(train, 4, 3), train, 5);
  const FeatureSet adapt_data = gaussian_blob(800, {1.0, -1.0}, 0.8, 103);
  const GmmModel adapted = map_adapt(ubm, adapt_data, AdaptationConfig{14.0, false});
  adapted.validate();
  CHECK(adapted.weights != ubm.weights);
}

TEST_CASE("scoring a model against itself gives exactly zero") {
  const FeatureSet train = gaussian_blob(1000, {0.0, 0.0}, 1.0, 110);
  const GmmModel ubm = em_train(vq_init(train, 4, 3), train, 5);
  const FeatureSet test = gaussian_blob(50, {0.0, 0.0}, 1.0, 111);
  CHECK(score_utterance(ubm, ubm, test, ScoringConfig{2}) == 0.0);
}

TEST_CASE("adaptation toward the test data raises the score") {
  const FeatureSet train = concat(gaussian_blob(2000, {0.0, 0.0}, 1.5, 120),
                                  gaussian_blob(2000, {3.0, -1.0}, 1.5, 121));
  const GmmModel ubm = em_train(vq_init(train, 8, 3), train, 6);
  const FeatureSet speaker = gaussian_blob(400, {2.0, 1.0}, 0.8, 122);
  const GmmModel target = map_adapt(ubm, speaker, AdaptationConfig{});
  CHECK(score_utterance(target, ubm, speaker, ScoringConfig{5}) > 0.0);
}

TEST_CASE("top-C covering every mixture equals the full ratio") {
  const FeatureSet train = concat(gaussian_blob(1500, {0.0, 1.0}, 1.0, 130),
                                  gaussian_blob(1500, {-2.0, 3.0}, 1.2, 131));
  const GmmModel ubm = em_train(vq_init(train, 8, 3), train, 5);
  const FeatureSet speaker = gaussian_blob(300, {1.0, 2.0}, 1.0, 132);
  const GmmModel target = map_adapt(ubm, speaker, AdaptationConfig{});
  const FeatureSet test = gaussian_blob(100, {0.5, 1.5}, 1.0, 133);
  const double fast = score_utterance(target, ubm, test, ScoringConfig{8});
  const double slow = full_llr(target, ubm, test);
  CHECK(std::abs(fast - slow) <= 1e-10);
}

TEST_CASE("log-domain scoring survives extreme frames") {
  const FeatureSet train = gaussian_blob(500, {0.0, 0.0}, 1.0, 145);
  const GmmModel ubm = em_train(vq_init(train, 4, 3), train, 3);
  const GmmModel target = map_adapt(ubm, gaussian_blob(50, {1.0, 1.0}, 1.0, 146),
                                    AdaptationConfig{});
  FeatureSet far_out;
  far_out.dim = 2;
  far_out.data = {1e6, -1e6, 0.0, 1e8};
  const double s = score_utterance(target, ubm, far_out, ScoringConfig{2});
  CHECK(std::isfinite(s));
  CHECK(std::isfinite(avg_log_likelihood(ubm, far_out)));
}

TEST_CASE("scoring input validation") {
  const FeatureSet train = gaussian_blob(500, {0.0}, 1.0, 140);
  const GmmModel ubm = em_train(vq_init(train, 2, 3), train, 3);
  CHECK_THROWS_AS(score_utterance(ubm, ubm, FeatureSet{}, ScoringConfig{1}), EmptyFeatures);
  const FeatureSet wrong = gaussian_blob(10, {0.0, 0.0}, 1.0, 141);
  CHECK_THROWS_AS(score_utterance(ubm, ubm, wrong, ScoringConfig{1}), DimensionMismatch);
  const FeatureSet ok = gaussian_blob(10, {0.0}, 1.0, 142);
  CHECK_THROWS_AS(score_utterance(ubm, ubm, ok, ScoringConfig{3}), ConfigError);
}

TEST_CASE("zt-norm identities") {
  // Population stats: mean 0, std 1 for both cohorts.
  const std::vector<double> unit{-1.0, 1.0};
  CHECK(zt_norm(0.7, unit, unit) == doctest::Approx(0.7).epsilon(1e-12));
  // raw at the z mean: z-score is 0, so only the t stats act.
  const std::vector<double> z{2.0, 4.0};
  const std::vector<double> t{3.0, 5.0};
  const double expected = (0.0 - ((3.0 - 3.0) / 1.0 + (5.0 - 3.0) / 1.0) / 2.0) /
                          1.0;  // t' = {0, 2}: mean 1, std 1
  CHECK(zt_norm(3.0, z, t) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("zt-norm ignores affine recalibration") {
  Rng rng(55);
  std::vector<double> z(20), t(15);
  for (auto& v : z) v = rng.gaussian();
  for (auto& v : t) v = rng.gaussian() + 0.3;
  const double raw = 0.42;
  const double base = zt_norm(raw, z, t);
  const double a = 2.7, b = -1.3;
  std::vector<double> z2(z), t2(t);
  for (auto& v : z2) v = a * v + b;
  for (auto& v : t2) v = a * v + b;
  CHECK(zt_norm(a * raw + b, z2, t2) == doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("degenerate cohorts are rejected") {
  const std::vector<double> constant{1.0, 1.0, 1.0};
  const std::vector<double> ok{0.0, 1.0};
  CHECK_THROWS_AS(zt_norm(0.5, constant, ok), DegenerateCohort);
  CHECK_THROWS_AS(zt_norm(0.5, ok, constant), DegenerateCohort);
  const std::vector<double> single{1.0};
  CHECK_THROWS_AS(zt_norm(0.5, single, ok), DegenerateCohort);
}

TEST_CASE("model file round trip") {
  const FeatureSet train = gaussian_blob(800, {0.0, 2.0, -1.0}, 1.0, 150);
  const GmmModel m = em_train(vq_init(train, 4, 3), train, 4);
  const auto path = std::filesystem::temp_directory_path() / "tauwin_test_model.gum";
  write_model(m, path);
  const GmmModel back = read_model(path);
  CHECK(back.num_mixtures == m.num_mixtures);
  CHECK(back.dim == m.dim);
  CHECK(back.weights == m.weights);
  CHECK(back.means == m.means);
  CHECK(back.variances == m.variances);

  {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f << "XXXX" << std::string(16, '\0');
  }
  CHECK_THROWS_AS(read_model(path), FormatError);

  {
    // Valid magic but a zero mixture count.
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    const unsigned char zeros[8] = {0, 0, 0, 0, 1, 0, 0, 0};
    f << "GUM1";
    f.write(reinterpret_cast<const char*>(zeros), 8);
  }
  CHECK_THROWS_AS(read_model(path), FormatError);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_model(path), IoError);
}
