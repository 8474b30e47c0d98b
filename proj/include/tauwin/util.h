// include/tauwin/util.h

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

#ifndef TAUWIN_UTIL_H_
#define TAUWIN_UTIL_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace tauwin {

// FNV-1a over the bytes of a canonical text form; used for config digests.
std::uint64_t fnv1a64(const std::string& text);
std::string hex_digest(std::uint64_t value);

double mean(std::span<const double> v);
// Population variance (divide by n).
double variance(std::span<const double> v);
double stddev(std::span<const double> v);

// p in [0,100]; linear interpolation between order statistics.
// Sorts a copy; v must be nonempty.
double percentile(std::span<const double> v, double p);

double logsumexp(std::span<const double> v);

// Deterministic PRNG with hand-rolled transforms so streams are identical
// across standard libraries.  splitmix64 core.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();
  // Uniform in [0,1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);
  // Standard normal via Box-Muller.
  double gaussian();
  // Derive an independent substream for (stream, index) pairs.
  static Rng substream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Runs fn(i) for i in [0, count) on up to hardware_concurrency worker
// threads.  Callers keep determinism by writing only to slot i.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

// Caps the worker count (0 restores the hardware default).  Reductions
// built on parallel_for are chunk-ordered, so results must not depend on
// this setting; tests rely on that.
void set_parallelism(unsigned max_workers);
unsigned effective_parallelism();

}  // namespace tauwin

#endif  // TAUWIN_UTIL_H_
