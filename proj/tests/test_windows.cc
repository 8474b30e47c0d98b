// tests/test_windows.cc

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

#include "tauwin/errors.h"
#include "tauwin/windows.h"

using namespace tauwin;

namespace {

double hamming_at(int n, int length) {
  return 0.54 - 0.46 * std::cos(2.0 * M_PI * n / (length - 1));
}

// Independent route for the tau=2 peak position: evaluate n^2 w(n)
// directly and take the argmax.
int argmax_weighted_hamming(int order, int length) {
  int best = 0;
  double best_v = -1.0;
  for (int n = 0; n < length; ++n) {
    double v = hamming_at(n, length);
    for (int t = 0; t < order; ++t) v *= n;
    if (v > best_v) {
      best_v = v;
      best = n;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("hamming endpoints and the tau factor") {
  const Window h0 = make_window({WindowBase::kHamming, 0, 160, WindowNormalize::kNone});
  CHECK(h0.samples[0] == doctest::Approx(0.08).epsilon(1e-12));
  CHECK(h0.samples[159] == doctest::Approx(0.08).epsilon(1e-12));

  const Window h1 = make_window({WindowBase::kHamming, 1, 160, WindowNormalize::kNone});
  CHECK(h1.samples[0] == 0.0);
  const Window h2 = make_window({WindowBase::kHamming, 2, 160, WindowNormalize::kNone});
  CHECK(h2.samples[0] == 0.0);
}

TEST_CASE("tau=2 peak sits where n^2 w(n) says it does") {
  const Window h2 = make_window({WindowBase::kHamming, 2, 160, WindowNormalize::kUnitPeak});
  const int expected = argmax_weighted_hamming(2, 160);
  CHECK(expected == 105);  // n^2 growth against the cosine decay peaks here
  int got = 0;
  for (int n = 1; n < 160; ++n)
    if (h2.samples[n] > h2.samples[got]) got = n;
  CHECK(got == expected);
  CHECK(h2.samples[got] == doctest::Approx(1.0).epsilon(1e-12));  // unit peak
}

TEST_CASE("family consistency: order tau equals n^tau times order zero") {
  for (WindowBase base : {WindowBase::kHamming, WindowBase::kHanning, WindowBase::kRectangular}) {
    const Window w0 = make_window({base, 0, 96, WindowNormalize::kNone});
    for (int tau : {1, 2, 3}) {
      const Window wt = make_window({base, tau, 96, WindowNormalize::kNone});
      for (int n = 0; n < 96; ++n) {
        double weight = 1.0;
        for (int t = 0; t < tau; ++t) weight *= n;
        CHECK(wt.samples[n] == weight * w0.samples[n]);
      }
    }
  }
}

TEST_CASE("order zero hamming is the classical window exactly") {
  const Window w = make_window({WindowBase::kHamming, 0, 160, WindowNormalize::kNone});
  for (int n = 0; n < 160; ++n) CHECK(w.samples[n] == hamming_at(n, 160));
}

TEST_CASE("reported metrics for N=160") {
  const std::size_t nfft = metrics_fft_size(160);
  CHECK(nfft == 4096);
  struct Row {
    int tau;
    double leak_percent, rsa_db, width;
  };
  const Row rows[] = {{0, 0.04, -42.6, 0.015625}, {1, 0.06, -42.6, 0.017578},
                      {2, 0.17, -37.9, 0.018555}};
  const double grid_step = 2.0 / static_cast<double>(nfft);
  for (const Row& row : rows) {
    const Window w = make_window({WindowBase::kHamming, row.tau, 160, WindowNormalize::kNone});
    const WindowMetrics m = window_metrics(w, nfft);
    CHECK(std::abs(100.0 * m.leakage_factor - row.leak_percent) <= 0.01);
    CHECK(std::abs(m.relative_sidelobe_attenuation_db - row.rsa_db) <= 0.2);
    CHECK(std::abs(m.mainlobe_width_3db - row.width) <= grid_step);
  }
}

TEST_CASE("mainlobe width grows with the order") {
  const std::size_t nfft = metrics_fft_size(160);
  double prev = 0.0;
  for (int tau : {0, 1, 2}) {
    const Window w = make_window({WindowBase::kHamming, tau, 160, WindowNormalize::kNone});
    const double width = window_metrics(w, nfft).mainlobe_width_3db;
    CHECK(width > prev);
    prev = width;
  }
}

TEST_CASE("metrics ignore unit-peak normalization") {
  for (int tau : {0, 1, 2}) {
    const Window plain = make_window({WindowBase::kHamming, tau, 160, WindowNormalize::kNone});
    const Window unit = make_window({WindowBase::kHamming, tau, 160, WindowNormalize::kUnitPeak});
    const WindowMetrics a = window_metrics(plain, 4096);
    const WindowMetrics b = window_metrics(unit, 4096);
    CHECK(a.leakage_factor == doctest::Approx(b.leakage_factor).epsilon(1e-12));
    CHECK(a.relative_sidelobe_attenuation_db ==
          doctest::Approx(b.relative_sidelobe_attenuation_db).epsilon(1e-12));
    CHECK(a.mainlobe_width_3db == b.mainlobe_width_3db);
  }
}

TEST_CASE("metric invariants hold across the family") {
  for (int tau : {0, 1, 2, 3}) {
    const Window w = make_window({WindowBase::kHamming, tau, 128, WindowNormalize::kNone});
    const WindowMetrics m = window_metrics(w, metrics_fft_size(128));
    CHECK(m.leakage_factor >= 0.0);
    CHECK(m.leakage_factor < 1.0);
    CHECK(m.relative_sidelobe_attenuation_db < 0.0);
    CHECK(m.mainlobe_width_3db > 0.0);
    CHECK(m.mainlobe_width_3db < 2.0);
  }
}

TEST_CASE("apply_window basics") {
  const Window w = make_window({WindowBase::kHamming, 1, 160, WindowNormalize::kNone});

  std::vector<double> zeros(160, 0.0);
  for (double v : apply_window(w, zeros)) CHECK(v == 0.0);

  const Window rect = make_window({WindowBase::kRectangular, 0, 8, WindowNormalize::kNone});
  const std::vector<double> frame{1, -2, 3, -4, 5, -6, 7, -8};
  CHECK(apply_window(rect, frame) == frame);

  std::vector<double> impulse(160, 0.0);
  impulse[3] = 1.0;
  const auto out = apply_window(w, impulse);
  const double expected = 3.0 * (0.54 - 0.46 * std::cos(6.0 * M_PI / 159.0));
  for (int n = 0; n < 160; ++n) {
    if (n == 3)
      CHECK(out[n] == doctest::Approx(expected).epsilon(1e-12));
    else
      CHECK(out[n] == 0.0);
  }
}

TEST_CASE("error paths") {
  CHECK_THROWS_AS(make_window({WindowBase::kHamming, 0, 1, WindowNormalize::kNone}),
                  InvalidLength);
  const Window w = make_window({WindowBase::kHamming, 0, 160, WindowNormalize::kNone});
  CHECK_THROWS_AS(window_metrics(w, 512), InvalidFftSize);  // < 4N
  std::vector<double> wrong(40, 1.0);
  CHECK_THROWS_AS(apply_window(w, wrong), LengthMismatch);
}
