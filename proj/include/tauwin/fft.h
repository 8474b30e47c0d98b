// include/tauwin/fft.h

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

#ifndef TAUWIN_FFT_H_
#define TAUWIN_FFT_H_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace tauwin {

using cdouble = std::complex<double>;

bool is_power_of_two(std::size_t n);
std::size_t next_power_of_two(std::size_t n);

// Forward DFT, X[k] = sum_n x[n] exp(-j 2 pi k n / N).  Any size >= 1;
// powers of two run radix-2 in place, everything else goes through
// Bluestein's chirp-z on a padded power-of-two convolution.
std::vector<cdouble> fft(std::vector<cdouble> x);
std::vector<cdouble> ifft(std::vector<cdouble> x);

// Real input, zero-padded to fft_size; returns bins 0..fft_size/2.
std::vector<cdouble> rfft(std::span<const double> frame, std::size_t fft_size);

// Full two-sided DFT of a zero-padded real frame.
std::vector<cdouble> rfft_full(std::span<const double> frame, std::size_t fft_size);

}  // namespace tauwin

#endif  // TAUWIN_FFT_H_
