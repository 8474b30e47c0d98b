// include/tauwin/windows.h

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

#ifndef TAUWIN_WINDOWS_H_
#define TAUWIN_WINDOWS_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace tauwin {

enum class WindowBase { kHamming, kHanning, kRectangular };
enum class WindowNormalize { kNone, kUnitPeak };

const char* window_base_name(WindowBase base);
WindowBase window_base_from_name(const std::string& name);  // throws ConfigError

// A member of the family n^tau * w(n): a base taper raised by a monomial
// weight.  order 0 with a Hamming base is the classical Hamming window.
struct WindowSpec {
  WindowBase base = WindowBase::kHamming;
  int order = 0;  // tau >= 0
  int length = 160;  // N >= 2, samples
  WindowNormalize normalize = WindowNormalize::kNone;

  void validate() const;  // throws InvalidLength / ConfigError
  std::string digest_string() const;  // canonical text form for hashing
};

struct Window {
  WindowSpec spec;
  std::vector<double> samples;  // length spec.length
};

struct WindowMetrics {
  // Fraction of spectral power outside the mainlobe, in [0, 1).
  double leakage_factor = 0.0;
  // Peak sidelobe level relative to the mainlobe peak, dB (< 0 for tapers).
  double relative_sidelobe_attenuation_db = 0.0;
  // -3 dB mainlobe width in normalized frequency, units of pi rad/sample.
  double mainlobe_width_3db = 0.0;
};

// samples[n] = n^tau * base(n); Hamming base is the symmetric form
// 0.54 - 0.46 cos(2 pi n / (N-1)).  Normalization is applied last.
Window make_window(const WindowSpec& spec);

// Metrics from the magnitude of the zero-padded spectrum.  The mainlobe is
// bounded by the first strict local minimum on each side of the global
// peak (ties break toward the peak); the -3 dB width is quantized to the
// FFT grid.  Requires fft_size >= 4 * N.
WindowMetrics window_metrics(const Window& w, std::size_t fft_size);

// Dense grid used for reported metrics: max(4096, next power of two >= 8N).
std::size_t metrics_fft_size(std::size_t window_length);

// Elementwise product; frame length must match the window length.
std::vector<double> apply_window(const Window& w, std::span<const double> frame);

}  // namespace tauwin

#endif  // TAUWIN_WINDOWS_H_
