// src/spectral.cc

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

#include "tauwin/spectral.h"

#include <algorithm>
#include <cmath>

#include "tauwin/errors.h"
#include "tauwin/util.h"
#include "tauwin/windows.h"

namespace tauwin {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

bool all_zero(std::span<const double> frame) {
  for (double v : frame)
    if (v != 0.0) return false;
  return true;
}

double principal_phase(const cdouble& z) {
  if (z.real() == 0.0 && z.imag() == 0.0) return 0.0;
  double p = std::atan2(z.imag(), z.real());
  if (p == -M_PI) p = M_PI;
  return p;
}

// Angle of (dXr/dw, dXi/dw) recovered from the transform of n*x(n):
// that transform equals j dX/dw, so dX/dw = -j * X_hat.
double derivative_phase(const cdouble& xhat) {
  return principal_phase(cdouble(xhat.imag(), -xhat.real()));
}

}  // namespace

SpectralFrame spectrum(std::span<const double> frame, std::size_t fft_size) {
  if (fft_size < frame.size())
    throw InvalidFftSize("spectrum: fft_size must be >= frame length");
  SpectralFrame out;
  out.fft_size = fft_size;
  out.complex_bins = rfft(frame, fft_size);
  out.power.resize(out.complex_bins.size());
  out.phase.resize(out.complex_bins.size());
  for (std::size_t k = 0; k < out.complex_bins.size(); ++k) {
    out.power[k] = std::norm(out.complex_bins[k]);
    out.phase[k] = principal_phase(out.complex_bins[k]);
  }
  return out;
}

double verify_freq_diff_property(std::span<const double> frame, std::size_t fft_size,
                                 int dense_factor) {
  if (all_zero(frame)) throw ZeroSignal("verify_freq_diff_property: zero frame");
  if (fft_size < frame.size())
    throw InvalidFftSize("verify_freq_diff_property: fft_size must be >= frame length");
  if (dense_factor < 8)
    throw DegenerateGrid("verify_freq_diff_property: dense_factor must be >= 8");

  std::vector<double> weighted(frame.size());
  for (std::size_t n = 0; n < frame.size(); ++n)
    weighted[n] = static_cast<double>(n) * frame[n];
  const std::vector<cdouble> direct = rfft(weighted, fft_size);

  const std::size_t dense_size = fft_size * static_cast<std::size_t>(dense_factor);
  const std::vector<cdouble> dense = rfft_full(frame, dense_size);
  const double h = kTwoPi / static_cast<double>(dense_size);

  // Reference at coarse bin k: j * dX/dw by a central difference around
  // dense index k * dense_factor (wraparound is exact, the spectrum is
  // 2 pi periodic).
  std::vector<cdouble> reference(direct.size());
  double max_mag = 0.0;
  for (std::size_t k = 0; k < direct.size(); ++k) {
    const std::size_t j = k * static_cast<std::size_t>(dense_factor);
    const cdouble dxdw =
        (dense[(j + 1) % dense_size] - dense[(j + dense_size - 1) % dense_size]) / (2.0 * h);
    reference[k] = cdouble(0.0, 1.0) * dxdw;
    max_mag = std::max(max_mag, std::abs(reference[k]));
  }

  const double eps_ref = 1e-9 * max_mag;
  double max_rel = 0.0;
  for (std::size_t k = 0; k < direct.size(); ++k) {
    const double ref_mag = std::abs(reference[k]);
    if (ref_mag <= eps_ref) continue;
    max_rel = std::max(max_rel, std::abs(direct[k] - reference[k]) / ref_mag);
  }
  return max_rel;
}

DerivativeDecomposition derivative_decomposition(std::span<const double> frame,
                                                 std::size_t grid_size) {
  if (all_zero(frame)) throw ZeroSignal("derivative_decomposition: zero frame");
  if (grid_size < 8 * frame.size())
    throw DegenerateGrid("derivative_decomposition: grid_size must be >= 8 * frame length");

  const int len = static_cast<int>(frame.size());
  const Window base = make_window({WindowBase::kHamming, 0, len, WindowNormalize::kNone});
  const Window deriv = make_window({WindowBase::kHamming, 1, len, WindowNormalize::kNone});
  const std::vector<double> x = apply_window(base, frame);
  const std::vector<double> xhat = apply_window(deriv, frame);

  const std::size_t g = grid_size;
  const std::vector<cdouble> bins = rfft_full(x, g);
  const std::vector<cdouble> bins_hat = rfft_full(xhat, g);

  std::vector<double> power_full(g);
  for (std::size_t j = 0; j < g; ++j) power_full[j] = std::norm(bins[j]);
  double max_power = 0.0;
  for (double p : power_full) max_power = std::max(max_power, p);

  const std::size_t m = g / 2 + 1;
  const double h = kTwoPi / static_cast<double>(g);

  DerivativeDecomposition d;
  d.omega_grid.resize(m);
  d.H.resize(m);
  d.H_hat.resize(m);
  d.dH_domega.resize(m);
  d.phi.resize(m);
  d.phi_hat.resize(m);
  d.dXr_domega.resize(m);
  d.dXi_domega.resize(m);
  d.residual.resize(m);
  d.excluded.assign(m, 0);

  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t prev = (i + g - 1) % g;
    const std::size_t next = (i + 1) % g;
    d.omega_grid[i] = h * static_cast<double>(i);
    d.H[i] = std::abs(bins[i]);
    d.H_hat[i] = std::abs(bins_hat[i]);
    d.phi[i] = principal_phase(bins[i]);
    d.phi_hat[i] = derivative_phase(bins_hat[i]);
    d.dXr_domega[i] = (bins[next].real() - bins[prev].real()) / (2.0 * h);
    d.dXi_domega[i] = (bins[next].imag() - bins[prev].imag()) / (2.0 * h);
    d.dH_domega[i] =
        d.H[i] > 0.0
            ? (bins[i].real() * d.dXr_domega[i] + bins[i].imag() * d.dXi_domega[i]) / d.H[i]
            : 0.0;

    const double p = power_full[i];
    const double cosine = std::cos(d.phi[i] - d.phi_hat[i]);
    if (p < 1e-6 * max_power || std::abs(cosine) < 1e-3) {
      d.excluded[i] = 1;
      d.residual[i] = 0.0;
      continue;
    }
    const double dp_domega =
        (power_full[next] - power_full[prev]) / (2.0 * h);
    const double rhs = dp_domega * dp_domega / (4.0 * p * cosine * cosine);
    d.residual[i] = std::abs(d.H_hat[i] * d.H_hat[i] - rhs);
  }
  return d;
}

ResidualStats residual_stats(const DerivativeDecomposition& d) {
  ResidualStats s;
  std::vector<double> rel;
  rel.reserve(d.residual.size());
  for (std::size_t i = 0; i < d.residual.size(); ++i) {
    if (d.excluded[i]) {
      ++s.excluded_count;
      continue;
    }
    const double denom = d.H_hat[i] * d.H_hat[i];
    if (denom <= 0.0) {
      ++s.excluded_count;
      continue;
    }
    rel.push_back(d.residual[i] / denom);
  }
  s.included_count = rel.size();
  if (!rel.empty()) {
    s.median_relative = percentile(rel, 50.0);
    s.p95_relative = percentile(rel, 95.0);
  }
  return s;
}

std::vector<double> multitaper_power(std::span<const double> frame, int num_tapers,
                                     std::size_t fft_size) {
  const std::size_t len = frame.size();
  if (num_tapers < 1 || static_cast<std::size_t>(num_tapers) >= len)
    throw TooManyTapers("multitaper_power: need 1 <= num_tapers < frame length");
  if (fft_size < len) throw InvalidFftSize("multitaper_power: fft_size must be >= frame length");

  std::vector<double> avg(fft_size / 2 + 1, 0.0);
  std::vector<double> tapered(len);
  for (int t = 0; t < num_tapers; ++t) {
    const double scale = std::sqrt(2.0 / (static_cast<double>(len) + 1.0));
    for (std::size_t n = 0; n < len; ++n) {
      const double taper =
          scale * std::sin(M_PI * static_cast<double>(t + 1) * static_cast<double>(n + 1) /
                           (static_cast<double>(len) + 1.0));
      tapered[n] = taper * frame[n];
    }
    const std::vector<cdouble> bins = rfft(tapered, fft_size);
    for (std::size_t k = 0; k < avg.size(); ++k) avg[k] += std::norm(bins[k]);
  }
  const double inv = 1.0 / static_cast<double>(num_tapers);
  for (double& v : avg) v *= inv;
  return avg;
}

}  // namespace tauwin
