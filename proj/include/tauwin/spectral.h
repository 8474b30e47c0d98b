// include/tauwin/spectral.h

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

#ifndef TAUWIN_SPECTRAL_H_
#define TAUWIN_SPECTRAL_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tauwin/fft.h"

namespace tauwin {

struct SpectralFrame {
  std::size_t fft_size = 0;
  std::vector<cdouble> complex_bins;  // one-sided, fft_size/2 + 1
  std::vector<double> power;          // |X(k)|^2
  std::vector<double> phase;          // principal value, (-pi, pi]; 0 for zero bins
};

// Zero-padded real-input DFT with one-sided bins.
SpectralFrame spectrum(std::span<const double> frame, std::size_t fft_size);

// Checks the transform-of-n*x(n) route against j dX/dw from central finite
// differences on a dense_factor-times oversampled spectrum.  Returns the
// max per-bin relative error over bins whose reference magnitude exceeds
// 1e-9 times the largest one.
double verify_freq_diff_property(std::span<const double> frame, std::size_t fft_size,
                                 int dense_factor);

// Slope/phase decomposition of the first-order-window power spectrum for a
// raw speech frame, with per-point residuals of the identity
//   H_hat^2 = (dP/dw)^2 sec^2(phi - phi_hat) / (4P).
// All arrays are one-sided over omega_grid; singular points (tiny P or
// near-orthogonal phases) are flagged in `excluded`, hold residual 0, and
// are skipped by residual_stats.
struct DerivativeDecomposition {
  std::vector<double> omega_grid;  // rad/sample, [0, pi]
  std::vector<double> H;           // |X| of the base-windowed frame
  std::vector<double> H_hat;       // |X_hat| of the derivative-windowed frame
  std::vector<double> dH_domega;   // slope via the finite-difference components
  std::vector<double> phi;         // phase of X
  std::vector<double> phi_hat;     // phase angle of the spectral derivative
  std::vector<double> dXr_domega;  // central finite differences of Re X
  std::vector<double> dXi_domega;  // central finite differences of Im X
  std::vector<double> residual;    // |lhs - rhs| per grid point
  std::vector<std::uint8_t> excluded;
};

struct ResidualStats {
  double median_relative = 0.0;
  double p95_relative = 0.0;
  std::size_t excluded_count = 0;
  std::size_t included_count = 0;
};

DerivativeDecomposition derivative_decomposition(std::span<const double> frame,
                                                 std::size_t grid_size);

// Relative residual = residual / H_hat^2 over non-excluded points.
ResidualStats residual_stats(const DerivativeDecomposition& d);

// Average of num_tapers single-taper power spectra under sine tapers
// t_m(n) = sqrt(2/(N+1)) sin(pi (m+1)(n+1)/(N+1)), uniform weights.
std::vector<double> multitaper_power(std::span<const double> frame, int num_tapers,
                                     std::size_t fft_size);

}  // namespace tauwin

#endif  // TAUWIN_SPECTRAL_H_
