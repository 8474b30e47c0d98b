// src/features.cc

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

#include "tauwin/features.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "tauwin/errors.h"
#include "tauwin/spectral.h"
#include "tauwin/util.h"

namespace tauwin {

namespace {

void put_u32le(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_f32le(std::string& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32le(out, bits);
}

std::uint32_t get_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

int MfccConfig::frame_samples() const {
  return static_cast<int>(std::lround(frame_len_ms * sample_rate / 1000.0));
}

int MfccConfig::hop_samples() const {
  return static_cast<int>(std::lround(frame_shift_ms * sample_rate / 1000.0));
}

void MfccConfig::validate() const {
  if (sample_rate <= 0) throw ConfigError("sample_rate must be positive");
  const double exact = frame_len_ms * sample_rate / 1000.0;
  if (std::abs(exact - std::lround(exact)) > 1e-9)
    throw ConfigError("frame_len_ms * sample_rate / 1000 must be an integer");
  if (frame_samples() < 2) throw ConfigError("frame too short");
  if (hop_samples() < 1) throw ConfigError("frame shift too short");
  if (num_filters < 2) throw ConfigError("need at least 2 mel filters");
  if (num_ceps < 1 || num_ceps >= num_filters)
    throw ConfigError("need 1 <= num_ceps < num_filters");
  if (fft_size < static_cast<std::size_t>(frame_samples()))
    throw ConfigError("fft_size must be >= frame samples");
  if (preemphasis < 0.0 || preemphasis >= 1.0) throw ConfigError("preemphasis must be in [0,1)");
  if (delta_context < 1) throw ConfigError("delta_context must be >= 1");
  if (energy_floor <= 0.0) throw ConfigError("energy_floor must be positive");
  if (multitaper_tapers < 0) throw ConfigError("multitaper_tapers must be >= 0");
  if (multitaper_tapers >= frame_samples())
    throw ConfigError("multitaper_tapers must be < frame samples");
  if (multitaper_tapers == 0) {
    window.validate();
    if (window.length != frame_samples())
      throw ConfigError("window length must equal frame samples");
  }
}

std::string MfccConfig::window_digest() const {
  const std::string text = multitaper_tapers > 0
                               ? "sine-multitaper|k=" + std::to_string(multitaper_tapers) +
                                     "|n=" + std::to_string(frame_samples())
                               : window.digest_string();
  return hex_digest(fnv1a64(text));
}

std::string MfccConfig::frontend_digest() const {
  std::ostringstream os;
  os << "mfcc|sr=" << sample_rate << "|len=" << frame_len_ms << "|shift=" << frame_shift_ms
     << "|nf=" << num_filters << "|nc=" << num_ceps << "|pre=" << preemphasis
     << "|deltas=" << (deltas ? 1 : 0) << "|ctx=" << delta_context << "|fft=" << fft_size
     << "|floor=" << energy_floor << "|vad=" << vad_percentile;
  return hex_digest(fnv1a64(os.str()));
}

std::string MfccConfig::digest() const {
  return hex_digest(fnv1a64(frontend_digest() + "+" + window_digest()));
}

double mel_from_hz(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double hz_from_mel(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

std::vector<std::vector<double>> frame_signal(std::span<const double> samples,
                                              const MfccConfig& config) {
  config.validate();
  const std::size_t frame_len = static_cast<std::size_t>(config.frame_samples());
  const std::size_t hop = static_cast<std::size_t>(config.hop_samples());
  if (samples.size() < frame_len)
    throw SignalTooShort("signal shorter than one frame");
  const std::size_t count = (samples.size() - frame_len) / hop + 1;
  std::vector<std::vector<double>> frames(count);
  for (std::size_t t = 0; t < count; ++t) {
    frames[t].assign(samples.begin() + t * hop, samples.begin() + t * hop + frame_len);
  }
  return frames;
}

MelFilterbank build_mel_filterbank(const MfccConfig& config) {
  config.validate();
  MelFilterbank fb;
  fb.num_filters = config.num_filters;
  fb.fft_size = config.fft_size;

  const double mel_max = mel_from_hz(config.sample_rate / 2.0);
  // Knots 0..num_filters+1 uniform in mel; interior knots are the centers.
  std::vector<double> knots_mel(config.num_filters + 2);
  for (int i = 0; i < config.num_filters + 2; ++i)
    knots_mel[i] = mel_max * static_cast<double>(i) / (config.num_filters + 1);

  fb.center_freqs_hz.resize(config.num_filters);
  for (int m = 0; m < config.num_filters; ++m)
    fb.center_freqs_hz[m] = hz_from_mel(knots_mel[m + 1]);

  const std::size_t bins = config.fft_size / 2 + 1;
  std::vector<double> bin_mel(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    const double hz = static_cast<double>(k) * config.sample_rate / config.fft_size;
    bin_mel[k] = mel_from_hz(hz);
  }

  fb.filters.resize(config.num_filters);
  for (int m = 0; m < config.num_filters; ++m) {
    const double left = knots_mel[m];
    const double center = knots_mel[m + 1];
    const double right = knots_mel[m + 2];
    MelFilterbank::Filter filter;
    bool started = false;
    for (std::size_t k = 0; k < bins; ++k) {
      double w = 0.0;
      if (bin_mel[k] > left && bin_mel[k] < right) {
        w = bin_mel[k] <= center ? (bin_mel[k] - left) / (center - left)
                                 : (right - bin_mel[k]) / (right - center);
      }
      if (w > 0.0) {
        if (!started) {
          filter.first_bin = k;
          started = true;
        }
        filter.weights.push_back(w);
      } else if (started) {
        break;
      }
    }
    fb.filters[m] = std::move(filter);
  }
  return fb;
}

std::vector<double> dct2_orthonormal(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t m = 0; m < n; ++m)
      acc += v[m] * std::cos(M_PI * static_cast<double>(j) * (static_cast<double>(m) + 0.5) /
                             static_cast<double>(n));
    const double scale = j == 0 ? std::sqrt(1.0 / static_cast<double>(n))
                                : std::sqrt(2.0 / static_cast<double>(n));
    out[j] = scale * acc;
  }
  return out;
}

std::vector<double> idct2_orthonormal(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t m = 0; m < n; ++m) {
    double acc = std::sqrt(1.0 / static_cast<double>(n)) * v[0];
    for (std::size_t j = 1; j < n; ++j)
      acc += std::sqrt(2.0 / static_cast<double>(n)) * v[j] *
             std::cos(M_PI * static_cast<double>(j) * (static_cast<double>(m) + 0.5) /
                      static_cast<double>(n));
    out[m] = acc;
  }
  return out;
}

std::vector<std::vector<double>> power_frames(std::span<const double> samples,
                                              const MfccConfig& config) {
  config.validate();

  // Pre-emphasis over the whole signal so it stays continuous across
  // frame boundaries.
  std::vector<double> emphasized(samples.begin(), samples.end());
  if (config.preemphasis > 0.0) {
    for (std::size_t n = emphasized.size(); n-- > 1;)
      emphasized[n] -= config.preemphasis * emphasized[n - 1];
  }

  std::vector<std::vector<double>> frames = frame_signal(emphasized, config);

  if (config.vad_percentile >= 0.0) {
    std::vector<double> energy_db(frames.size());
    for (std::size_t t = 0; t < frames.size(); ++t) {
      double e = 0.0;
      for (double v : frames[t]) e += v * v;
      energy_db[t] = 10.0 * std::log10(std::max(e, config.energy_floor));
    }
    const double threshold = percentile(energy_db, config.vad_percentile) - 30.0;
    std::vector<std::vector<double>> kept;
    kept.reserve(frames.size());
    for (std::size_t t = 0; t < frames.size(); ++t)
      if (energy_db[t] >= threshold) kept.push_back(std::move(frames[t]));
    if (kept.empty()) throw SignalTooShort("VAD removed every frame");
    frames = std::move(kept);
  }

  std::vector<std::vector<double>> power(frames.size());
  if (config.multitaper_tapers > 0) {
    for (std::size_t t = 0; t < frames.size(); ++t)
      power[t] = multitaper_power(frames[t], config.multitaper_tapers, config.fft_size);
  } else {
    const Window win = make_window(config.window);
    for (std::size_t t = 0; t < frames.size(); ++t)
      power[t] = spectrum(apply_window(win, frames[t]), config.fft_size).power;
  }
  return power;
}

FeatureMatrix cepstra_from_power(const std::vector<std::vector<double>>& power,
                                 const MfccConfig& config) {
  config.validate();
  if (power.empty()) throw EmptyData("no power frames");
  const MelFilterbank fb = build_mel_filterbank(config);

  const std::size_t count = power.size();
  const int nc = config.num_ceps;
  std::vector<std::vector<double>> statics(count);
  std::vector<double> energies(config.num_filters);
  for (std::size_t t = 0; t < count; ++t) {
    if (power[t].size() != config.fft_size / 2 + 1)
      throw LengthMismatch("power frame size does not match fft_size");
    for (int m = 0; m < config.num_filters; ++m) {
      const auto& f = fb.filters[m];
      double acc = 0.0;
      for (std::size_t i = 0; i < f.weights.size(); ++i)
        acc += f.weights[i] * power[t][f.first_bin + i];
      energies[m] = std::log(std::max(acc, config.energy_floor));
    }
    const std::vector<double> ceps = dct2_orthonormal(energies);
    statics[t].assign(ceps.begin() + 1, ceps.begin() + 1 + nc);  // drop c0
  }

  const int dim = config.dim();
  FeatureMatrix fm;
  fm.config_digest = config.digest();
  fm.dim = dim;
  fm.frame_shift_ms = config.frame_shift_ms;
  fm.data.resize(count * static_cast<std::size_t>(dim));

  // Delta: normalized regression slope over +-delta_context frames with
  // replicated edges.
  const int ctx = config.delta_context;
  double norm = 0.0;
  for (int k = 1; k <= ctx; ++k) norm += 2.0 * k * k;
  for (std::size_t t = 0; t < count; ++t) {
    float* row = fm.data.data() + t * dim;
    for (int j = 0; j < nc; ++j) row[j] = static_cast<float>(statics[t][j]);
    if (!config.deltas) continue;
    for (int j = 0; j < nc; ++j) {
      double acc = 0.0;
      for (int k = 1; k <= ctx; ++k) {
        const std::size_t fwd = std::min(t + k, count - 1);
        const std::size_t bwd = t >= static_cast<std::size_t>(k) ? t - k : 0;
        acc += k * (statics[fwd][j] - statics[bwd][j]);
      }
      row[nc + j] = static_cast<float>(acc / norm);
    }
  }
  return fm;
}

FeatureMatrix extract(std::span<const double> samples, const MfccConfig& config) {
  return cepstra_from_power(power_frames(samples, config), config);
}

void write_features(const FeatureMatrix& fm, const std::filesystem::path& path) {
  std::string out;
  out.reserve(16 + fm.data.size() * 4);
  out.append("MFC1");
  put_u32le(out, static_cast<std::uint32_t>(fm.dim));
  put_u32le(out, static_cast<std::uint32_t>(fm.num_frames()));
  put_u32le(out, static_cast<std::uint32_t>(std::lround(fm.frame_shift_ms * 1000.0)));
  for (float v : fm.data) put_f32le(out, v);
  std::ofstream fout(path, std::ios::binary | std::ios::trunc);
  if (!fout) throw IoError("cannot write " + path.string());
  fout.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!fout) throw IoError("write failed: " + path.string());
}

FeatureMatrix read_features(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 16 || std::memcmp(bytes.data(), "MFC1", 4) != 0)
    throw FormatError("bad feature file magic: " + path.string());
  FeatureMatrix fm;
  fm.dim = static_cast<int>(get_u32le(bytes.data() + 4));
  const std::uint32_t count = get_u32le(bytes.data() + 8);
  fm.frame_shift_ms = static_cast<double>(get_u32le(bytes.data() + 12)) / 1000.0;
  if (fm.dim <= 0) throw FormatError("bad feature dimension: " + path.string());
  const std::size_t expect = 16 + static_cast<std::size_t>(count) * fm.dim * 4;
  if (bytes.size() != expect) throw FormatError("feature file size mismatch: " + path.string());
  fm.data.resize(static_cast<std::size_t>(count) * fm.dim);
  for (std::size_t i = 0; i < fm.data.size(); ++i) {
    const std::uint32_t bits = get_u32le(bytes.data() + 16 + 4 * i);
    float v;
    std::memcpy(&v, &bits, 4);
    fm.data[i] = v;
  }
  return fm;
}

}  // namespace tauwin
