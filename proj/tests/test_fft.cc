// tests/test_fft.cc

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

#include "tauwin/fft.h"
#include "tauwin/util.h"

using namespace tauwin;

namespace {

// Quadratic-time reference DFT.
std::vector<cdouble> dft_naive(const std::vector<cdouble>& x) {
  const std::size_t n = x.size();
  std::vector<cdouble> out(n, cdouble(0, 0));
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t m = 0; m < n; ++m) {
      const double ang = -2.0 * M_PI * static_cast<double>(k) * static_cast<double>(m) /
                         static_cast<double>(n);
      out[k] += x[m] * cdouble(std::cos(ang), std::sin(ang));
    }
  return out;
}

}  // namespace

TEST_CASE("power-of-two sizes match the naive DFT") {
  Rng rng(11);
  for (std::size_t n : {2ul, 8ul, 64ul, 256ul}) {
    std::vector<cdouble> x(n);
    for (auto& v : x) v = cdouble(rng.gaussian(), rng.gaussian());
    const auto fast = fft(x);
    const auto slow = dft_naive(x);
    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k) worst = std::max(worst, std::abs(fast[k] - slow[k]));
    CHECK(worst < 1e-9 * std::sqrt(static_cast<double>(n)));
  }
}

TEST_CASE("arbitrary sizes go through the chirp-z path") {
  Rng rng(12);
  for (std::size_t n : {3ul, 7ul, 12ul, 160ul, 321ul}) {
    std::vector<cdouble> x(n);
    for (auto& v : x) v = cdouble(rng.gaussian(), rng.gaussian());
    const auto fast = fft(x);
    const auto slow = dft_naive(x);
    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k) worst = std::max(worst, std::abs(fast[k] - slow[k]));
    CHECK(worst < 1e-8 * std::sqrt(static_cast<double>(n)));
  }
}

TEST_CASE("ifft inverts fft") {
  Rng rng(13);
  for (std::size_t n : {16ul, 100ul}) {
    std::vector<cdouble> x(n);
    for (auto& v : x) v = cdouble(rng.gaussian(), rng.gaussian());
    const auto back = ifft(fft(x));
    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k) worst = std::max(worst, std::abs(back[k] - x[k]));
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("Parseval for zero-padded real frames") {
  Rng rng(14);
  std::vector<double> frame(160);
  for (auto& v : frame) v = rng.gaussian();
  double energy = 0.0;
  for (double v : frame) energy += v * v;
  for (std::size_t fft_size : {256ul, 4096ul, 65536ul}) {
    const auto bins = rfft_full(frame, fft_size);
    double spectral = 0.0;
    for (const auto& z : bins) spectral += std::norm(z);
    spectral /= static_cast<double>(fft_size);
    CHECK(std::abs(spectral - energy) / energy < 1e-10);
  }
}

TEST_CASE("rfft one-sided layout") {
  std::vector<double> impulse{1.0};
  const auto bins = rfft(impulse, 8);
  REQUIRE(bins.size() == 5);
  for (const auto& z : bins) {
    CHECK(z.real() == doctest::Approx(1.0));
    CHECK(z.imag() == doctest::Approx(0.0));
  }
}
