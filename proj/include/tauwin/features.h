// include/tauwin/features.h

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

#ifndef TAUWIN_FEATURES_H_
#define TAUWIN_FEATURES_H_

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tauwin/windows.h"

namespace tauwin {

// MFCC front end: framing, pre-emphasis, a window from the n^tau family
// (or the sine-taper multitaper average), mel filterbank, log, DCT-II,
// deltas.  Defaults give 38-dim vectors from 20 ms frames at 50% overlap.
struct MfccConfig {
  int sample_rate = 8000;       // Hz
  double frame_len_ms = 20.0;
  double frame_shift_ms = 10.0;
  int num_filters = 20;
  int num_ceps = 19;            // c1..c19; c0 is discarded
  WindowSpec window{WindowBase::kHamming, 0, 160, WindowNormalize::kNone};
  int multitaper_tapers = 0;    // > 0 replaces the window with sine tapers
  double preemphasis = 0.97;    // 0 disables
  bool deltas = true;
  int delta_context = 2;        // frames each side
  std::size_t fft_size = 512;
  double energy_floor = 1e-10;
  double vad_percentile = -1.0;  // < 0 disables the energy VAD

  int frame_samples() const;
  int hop_samples() const;
  int dim() const { return num_ceps * (deltas ? 2 : 1); }
  void validate() const;  // throws ConfigError

  std::string digest() const;           // full front-end digest
  std::string window_digest() const;    // window / taper choice only
  std::string frontend_digest() const;  // everything except the window choice
};

struct FeatureMatrix {
  std::string config_digest;  // producing config; not serialized
  int dim = 0;
  double frame_shift_ms = 0.0;
  std::vector<float> data;  // row-major, num_frames x dim

  std::size_t num_frames() const { return dim > 0 ? data.size() / dim : 0; }
  std::span<const float> frame(std::size_t t) const {
    return std::span<const float>(data).subspan(t * dim, dim);
  }
  // Equality of the serialized content.
  bool operator==(const FeatureMatrix& o) const {
    return dim == o.dim && frame_shift_ms == o.frame_shift_ms && data == o.data;
  }
};

struct MelFilterbank {
  int num_filters = 0;
  std::size_t fft_size = 0;
  std::vector<double> center_freqs_hz;
  struct Filter {
    std::size_t first_bin = 0;
    std::vector<double> weights;  // contiguous one-sided bins, peak 1
  };
  std::vector<Filter> filters;
};

double mel_from_hz(double hz);
double hz_from_mel(double mel);

// Plain framing of `samples` (no pre-emphasis): frame_len at hop
// frame_shift, trailing partial frame dropped.
std::vector<std::vector<double>> frame_signal(std::span<const double> samples,
                                              const MfccConfig& config);

// Triangular filters with centers uniformly spaced on the mel scale
// between 0 and sample_rate/2; each filter's edges sit at the neighboring
// centers (0 and Nyquist at the ends).
MelFilterbank build_mel_filterbank(const MfccConfig& config);

// Orthonormal DCT-II and its inverse, for num_filters-length vectors.
std::vector<double> dct2_orthonormal(std::span<const double> v);
std::vector<double> idct2_orthonormal(std::span<const double> v);

// One-sided power spectra per frame, after pre-emphasis and windowing.
// This is the half of extract() that depends on the window choice.
std::vector<std::vector<double>> power_frames(std::span<const double> samples,
                                              const MfccConfig& config);

// Filterbank + log + DCT + deltas over precomputed power spectra.  The
// window choice cannot affect anything past this seam.
FeatureMatrix cepstra_from_power(const std::vector<std::vector<double>>& power,
                                 const MfccConfig& config);

FeatureMatrix extract(std::span<const double> samples, const MfccConfig& config);

// Fixed 16-octet header (magic "MFC1", u32le dim, count, frame shift in
// microseconds) followed by count*dim little-endian float32, row-major.
void write_features(const FeatureMatrix& fm, const std::filesystem::path& path);
FeatureMatrix read_features(const std::filesystem::path& path);

}  // namespace tauwin

#endif  // TAUWIN_FEATURES_H_
