// src/fft.cc

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

#include "tauwin/fft.h"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "tauwin/errors.h"

namespace tauwin {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Root tables are pure functions of (size, direction); cache them so
// repeated large transforms skip the trig pass.
const std::vector<cdouble>& cached_roots(std::size_t n, bool inverse) {
  static std::mutex mutex;
  static std::map<std::pair<std::size_t, bool>, std::unique_ptr<std::vector<cdouble>>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{n, inverse}];
  if (!slot) {
    if (cache.size() > 16) {
      // Drop the filled entries rather than tracking recency; rebuilding
      // is cheap next to unbounded growth.  Node-based erasure leaves the
      // reference to the new slot valid.
      for (auto it = cache.begin(); it != cache.end();)
        it = it->second ? cache.erase(it) : std::next(it);
    }
    const double ang0 = (inverse ? kTwoPi : -kTwoPi) / static_cast<double>(n);
    auto table = std::make_unique<std::vector<cdouble>>(std::max<std::size_t>(n >> 1, 1));
    for (std::size_t k = 0; k < (n >> 1); ++k)
      (*table)[k] = cdouble(std::cos(ang0 * static_cast<double>(k)),
                            std::sin(ang0 * static_cast<double>(k)));
    slot = std::move(table);
  }
  return *slot;
}

// Plain complex product; std::complex operator* would route through the
// NaN-recovering __muldc3 helper on every butterfly.
inline cdouble cmul(const cdouble& a, const cdouble& b) {
  return cdouble(a.real() * b.real() - a.imag() * b.imag(),
                 a.real() * b.imag() + a.imag() * b.real());
}

// Iterative radix-2 Cooley-Tukey, decimation in time.
void fft_pow2_inplace(std::vector<cdouble>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n <= 1) return;
  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  // Each stage takes a compact strided copy of the shared root table so
  // the butterflies stay cache friendly.
  const std::vector<cdouble>& root = cached_roots(n, inverse);
  std::vector<cdouble> w(n >> 1);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len >> 1;
    const std::size_t stride = n / len;
    for (std::size_t k = 0; k < half; ++k) w[k] = root[k * stride];
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const cdouble u = a[i + k];
        const cdouble v = cmul(a[i + k + half], w[k]);
        a[i + k] = u + v;
        a[i + k + half] = u - v;
      }
    }
  }
  if (inverse) {
    const double inv = 1.0 / static_cast<double>(n);
    for (auto& z : a) z *= inv;
  }
}

// Bluestein chirp-z transform for arbitrary n.
std::vector<cdouble> fft_bluestein(const std::vector<cdouble>& x, bool inverse) {
  const std::size_t n = x.size();
  const std::size_t m = next_power_of_two(2 * n - 1);
  // Chirp c[k] = exp(-j pi k^2 / n); k^2 is reduced mod 2n before the
  // divide so the angle stays exact for large k.
  std::vector<cdouble> chirp(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::uint64_t k2 = (static_cast<std::uint64_t>(k) * k) % (2 * n);
    const double ang = (inverse ? 1.0 : -1.0) * M_PI * static_cast<double>(k2) /
                       static_cast<double>(n);
    chirp[k] = cdouble(std::cos(ang), std::sin(ang));
  }
  std::vector<cdouble> a(m, cdouble(0.0, 0.0));
  std::vector<cdouble> b(m, cdouble(0.0, 0.0));
  for (std::size_t k = 0; k < n; ++k) a[k] = cmul(x[k], chirp[k]);
  b[0] = std::conj(chirp[0]);
  for (std::size_t k = 1; k < n; ++k) b[k] = b[m - k] = std::conj(chirp[k]);
  fft_pow2_inplace(a, false);
  fft_pow2_inplace(b, false);
  for (std::size_t k = 0; k < m; ++k) a[k] = cmul(a[k], b[k]);
  fft_pow2_inplace(a, true);
  std::vector<cdouble> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = cmul(a[k], chirp[k]);
  if (inverse) {
    const double inv = 1.0 / static_cast<double>(n);
    for (auto& z : out) z *= inv;
  }
  return out;
}

std::vector<cdouble> fft_any(std::vector<cdouble> x, bool inverse) {
  if (x.empty()) throw InvalidFftSize("fft of empty input");
  if (is_power_of_two(x.size())) {
    fft_pow2_inplace(x, inverse);
    return x;
  }
  return fft_bluestein(x, inverse);
}

}  // namespace

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<cdouble> fft(std::vector<cdouble> x) { return fft_any(std::move(x), false); }

std::vector<cdouble> ifft(std::vector<cdouble> x) { return fft_any(std::move(x), true); }

std::vector<cdouble> rfft_full(std::span<const double> frame, std::size_t fft_size) {
  if (fft_size == 0 || fft_size < frame.size())
    throw InvalidFftSize("fft_size must be >= frame length");
  std::vector<cdouble> buf(fft_size, cdouble(0.0, 0.0));
  for (std::size_t i = 0; i < frame.size(); ++i) buf[i] = cdouble(frame[i], 0.0);
  return fft_any(std::move(buf), false);
}

std::vector<cdouble> rfft(std::span<const double> frame, std::size_t fft_size) {
  std::vector<cdouble> full = rfft_full(frame, fft_size);
  full.resize(fft_size / 2 + 1);
  return full;
}

}  // namespace tauwin
