// src/windows.cc

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

#include "tauwin/windows.h"

#include <algorithm>
#include <cmath>

#include "tauwin/errors.h"
#include "tauwin/fft.h"

namespace tauwin {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double base_sample(WindowBase base, int n, int length) {
  switch (base) {
    case WindowBase::kHamming:
      return 0.54 - 0.46 * std::cos(kTwoPi * n / (length - 1));
    case WindowBase::kHanning:
      return 0.5 - 0.5 * std::cos(kTwoPi * n / (length - 1));
    case WindowBase::kRectangular:
      return 1.0;
  }
  return 0.0;
}

}  // namespace

const char* window_base_name(WindowBase base) {
  switch (base) {
    case WindowBase::kHamming: return "hamming";
    case WindowBase::kHanning: return "hanning";
    case WindowBase::kRectangular: return "rectangular";
  }
  return "?";
}

WindowBase window_base_from_name(const std::string& name) {
  if (name == "hamming") return WindowBase::kHamming;
  if (name == "hanning" || name == "hann") return WindowBase::kHanning;
  if (name == "rectangular" || name == "rect") return WindowBase::kRectangular;
  throw ConfigError("unknown window base: " + name);
}

void WindowSpec::validate() const {
  if (length < 2) throw InvalidLength("window length must be >= 2");
  if (order < 0) throw ConfigError("window order must be >= 0");
}

std::string WindowSpec::digest_string() const {
  return std::string(window_base_name(base)) + "|tau=" + std::to_string(order) +
         "|n=" + std::to_string(length) +
         "|norm=" + (normalize == WindowNormalize::kUnitPeak ? "unitpeak" : "none");
}

Window make_window(const WindowSpec& spec) {
  spec.validate();
  Window w;
  w.spec = spec;
  w.samples.resize(spec.length);
  for (int n = 0; n < spec.length; ++n) {
    // n^tau first, then one product with the taper: samples stay exactly
    // n^tau times the order-zero window.
    double weight = 1.0;
    for (int t = 0; t < spec.order; ++t) weight *= static_cast<double>(n);
    w.samples[n] = weight * base_sample(spec.base, n, spec.length);
  }
  if (spec.normalize == WindowNormalize::kUnitPeak) {
    const double peak = *std::max_element(w.samples.begin(), w.samples.end());
    if (peak > 0.0)
      for (double& v : w.samples) v /= peak;
  }
  return w;
}

std::size_t metrics_fft_size(std::size_t window_length) {
  return std::max<std::size_t>(4096, next_power_of_two(8 * window_length));
}

WindowMetrics window_metrics(const Window& w, std::size_t fft_size) {
  if (fft_size < 4 * w.samples.size())
    throw InvalidFftSize("window_metrics needs fft_size >= 4 * N");
  const std::vector<cdouble> bins = rfft_full(w.samples, fft_size);
  const std::size_t n = fft_size;
  std::vector<double> mag(n);
  for (std::size_t k = 0; k < n; ++k) mag[k] = std::abs(bins[k]);

  std::size_t peak = 0;
  for (std::size_t k = 1; k < n; ++k)
    if (mag[k] > mag[peak]) peak = k;

  // First strict local minimum on each side of the peak; a plateau while
  // descending stops at its first sample (tie toward the peak).
  const auto at = [&](std::ptrdiff_t i) {
    return mag[static_cast<std::size_t>(((i % static_cast<std::ptrdiff_t>(n)) + n) % n)];
  };
  const std::ptrdiff_t p = static_cast<std::ptrdiff_t>(peak);
  const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(n / 2);
  std::ptrdiff_t right = p + 1;
  while (right - p < half && at(right + 1) < at(right)) ++right;
  std::ptrdiff_t left = p - 1;
  while (p - left < half && at(left - 1) < at(left)) --left;

  double total_power = 0.0;
  for (std::size_t k = 0; k < n; ++k) total_power += mag[k] * mag[k];
  double mainlobe_power = 0.0;
  for (std::ptrdiff_t i = left; i <= right; ++i) mainlobe_power += at(i) * at(i);

  double max_side = 0.0;
  for (std::ptrdiff_t i = right + 1; i < left + static_cast<std::ptrdiff_t>(n); ++i)
    max_side = std::max(max_side, at(i));

  // -3 dB points: widest run around the peak that stays >= peak/sqrt(2),
  // quantized to the grid.
  const double threshold = mag[peak] / std::sqrt(2.0);
  std::ptrdiff_t r3 = 0;
  while (r3 + 1 <= right - p && at(p + r3 + 1) >= threshold) ++r3;
  std::ptrdiff_t l3 = 0;
  while (l3 + 1 <= p - left && at(p - l3 - 1) >= threshold) ++l3;

  WindowMetrics m;
  m.leakage_factor = std::max(0.0, 1.0 - mainlobe_power / total_power);
  m.relative_sidelobe_attenuation_db =
      20.0 * std::log10(std::max(max_side, 1e-300) / mag[peak]);
  m.mainlobe_width_3db = 2.0 * static_cast<double>(r3 + l3) / static_cast<double>(n);
  return m;
}

std::vector<double> apply_window(const Window& w, std::span<const double> frame) {
  if (frame.size() != w.samples.size())
    throw LengthMismatch("frame length does not match window length");
  std::vector<double> out(frame.size());
  for (std::size_t i = 0; i < frame.size(); ++i) out[i] = w.samples[i] * frame[i];
  return out;
}

}  // namespace tauwin
