// src/corpus.cc

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

#include "tauwin/corpus.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "tauwin/errors.h"
#include "tauwin/util.h"
#include "tauwin/wav.h"

namespace tauwin {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

SpeakerParams draw_voice(std::uint64_t seed, int speaker_index) {
  Rng rng = Rng::substream(seed, 0x7001, static_cast<std::uint64_t>(speaker_index));
  SpeakerParams p;
  char buf[16];
  std::snprintf(buf, sizeof(buf), "spk%03d", speaker_index);
  p.id = buf;
  p.f0_hz = rng.uniform(85.0, 250.0);
  p.formants_hz = {rng.uniform(280.0, 850.0), rng.uniform(950.0, 2100.0),
                   rng.uniform(2250.0, 3200.0), rng.uniform(3300.0, 3850.0)};
  p.bandwidths_hz = {rng.uniform(60.0, 120.0), rng.uniform(70.0, 140.0),
                     rng.uniform(90.0, 170.0), rng.uniform(120.0, 220.0)};
  return p;
}

// Two-pole resonator bank applied in cascade.
void resonate(std::vector<double>& x, double freq_hz, double bandwidth_hz, int sample_rate) {
  const double r = std::exp(-M_PI * bandwidth_hz / sample_rate);
  const double theta = kTwoPi * freq_hz / sample_rate;
  const double a1 = 2.0 * r * std::cos(theta);
  const double a2 = -r * r;
  const double gain = (1.0 - r) * std::sqrt(1.0 - 2.0 * r * std::cos(2.0 * theta) + r * r);
  double y1 = 0.0, y2 = 0.0;
  for (double& v : x) {
    const double y = gain * v + a1 * y1 + a2 * y2;
    y2 = y1;
    y1 = y;
    v = y;
  }
}

}  // namespace

void SynthCorpusSpec::validate() const {
  if (num_speakers < 1 || utterances_per_speaker < 1) throw ConfigError("corpus counts must be positive");
  if (utterance_seconds <= 0.0) throw ConfigError("utterance_seconds must be positive");
  if (sample_rate < 1000) throw ConfigError("sample_rate must be >= 1000");
}

std::vector<double> synth_utterance(const SpeakerParams& voice, double seconds, int sample_rate,
                                    std::uint64_t seed, int speaker_index, int utterance_index) {
  Rng rng = Rng::substream(seed, 0x7100 + static_cast<std::uint64_t>(speaker_index),
                           static_cast<std::uint64_t>(utterance_index));
  const std::size_t n = static_cast<std::size_t>(std::lround(seconds * sample_rate));

  const double f0 = voice.f0_hz * rng.uniform(0.95, 1.05);
  const double vibrato_rate = rng.uniform(3.0, 6.0);
  const double vibrato_depth = 0.03;
  const double syllable_rate = rng.uniform(2.0, 4.0);
  const double syllable_phase = rng.uniform(0.0, kTwoPi);

  // Glottal source: jittered pulse train plus aspiration noise.
  std::vector<double> x(n, 0.0);
  double t = 0.0;
  while (t < static_cast<double>(n)) {
    const std::size_t at = static_cast<std::size_t>(t);
    if (at < n) x[at] += 1.0;
    const double instant_f0 =
        f0 * (1.0 + vibrato_depth * std::sin(kTwoPi * vibrato_rate * t / sample_rate)) *
        rng.uniform(0.985, 1.015);
    t += static_cast<double>(sample_rate) / instant_f0;
  }
  for (std::size_t i = 0; i < n; ++i) x[i] += 0.02 * rng.gaussian();

  // Pulse shaping: two leaky integrators then a differentiator gives the
  // usual downward source tilt with lip-radiation emphasis.
  double s1 = 0.0, s2 = 0.0;
  for (double& v : x) {
    s1 = v + 0.97 * s1;
    s2 = s1 + 0.97 * s2;
    v = s2;
  }
  double prev = 0.0;
  for (double& v : x) {
    const double cur = v;
    v = cur - prev;
    prev = cur;
  }

  // Small per-utterance formant drift: the same vocal tract never hits
  // exactly the same configuration twice.
  for (std::size_t f = 0; f < voice.formants_hz.size(); ++f)
    resonate(x, voice.formants_hz[f] * rng.uniform(0.97, 1.03), voice.bandwidths_hz[f],
             sample_rate);

  // Syllabic amplitude contour keeps utterances from being a flat buzz.
  for (std::size_t i = 0; i < n; ++i) {
    const double env =
        0.55 + 0.45 * std::sin(kTwoPi * syllable_rate * static_cast<double>(i) / sample_rate +
                               syllable_phase);
    x[i] *= env;
  }

  // Per-utterance channel: a random first-order tilt stands in for
  // handset variation between recordings.
  const double tilt = rng.uniform(-0.6, 0.6);
  double tilt_prev = 0.0;
  for (double& v : x) {
    const double cur = v;
    v = cur - tilt * tilt_prev;
    tilt_prev = cur;
  }

  // Additive noise at a random per-utterance SNR.
  double signal_power = 0.0;
  for (double v : x) signal_power += v * v;
  signal_power /= static_cast<double>(n);
  const double snr_db = rng.uniform(12.0, 22.0);
  const double noise_sigma = std::sqrt(signal_power / std::pow(10.0, snr_db / 10.0));
  for (double& v : x) v += noise_sigma * rng.gaussian();

  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  const double level = 0.35 * rng.uniform(0.85, 1.0);
  if (peak > 0.0)
    for (double& v : x) v *= level / peak;
  return x;
}

CorpusManifest synth_corpus(const SynthCorpusSpec& spec, const std::filesystem::path& out_dir) {
  spec.validate();
  std::filesystem::create_directories(out_dir);

  const int background = std::clamp(spec.num_speakers * 2 / 5, spec.num_speakers > 2 ? 1 : 0,
                                    std::max(spec.num_speakers - 2, 0));
  const int enroll =
      std::clamp(spec.utterances_per_speaker / 2, 1, std::max(spec.utterances_per_speaker - 1, 1));

  CorpusManifest manifest;
  manifest.sample_rate = spec.sample_rate;
  manifest.seed = spec.seed;
  manifest.root = out_dir;
  manifest.speakers.resize(spec.num_speakers);

  for (int s = 0; s < spec.num_speakers; ++s) {
    CorpusManifest::Speaker& spk = manifest.speakers[s];
    spk.params = draw_voice(spec.seed, s);
    spk.params.role = s < background ? "background" : "target";
    std::filesystem::create_directories(out_dir / spk.params.id);
    for (int u = 0; u < spec.utterances_per_speaker; ++u) {
      char name[32];
      std::snprintf(name, sizeof(name), "utt%03d.wav", u);
      UtteranceEntry entry;
      entry.path = spk.params.id + "/" + name;
      if (spk.params.role == "background")
        entry.split = "ubm";
      else
        entry.split = u < enroll ? "enroll" : "test";
      spk.utterances.push_back(entry);
    }
  }

  // Utterances are independent; synthesize in parallel, one file each.
  std::vector<std::pair<int, int>> jobs;
  for (int s = 0; s < spec.num_speakers; ++s)
    for (int u = 0; u < spec.utterances_per_speaker; ++u) jobs.emplace_back(s, u);
  parallel_for(jobs.size(), [&](std::size_t j) {
    const auto [s, u] = jobs[j];
    const CorpusManifest::Speaker& spk = manifest.speakers[s];
    WavData wav;
    wav.sample_rate = spec.sample_rate;
    wav.samples = synth_utterance(spk.params, spec.utterance_seconds, spec.sample_rate,
                                  spec.seed, s, u);
    write_wav(out_dir / spk.utterances[u].path, wav);
  });

  write_manifest(manifest, out_dir / "manifest.json");
  return manifest;
}

void write_manifest(const CorpusManifest& manifest, const std::filesystem::path& path) {
  nlohmann::json j;
  j["sample_rate"] = manifest.sample_rate;
  j["seed"] = manifest.seed;
  j["speakers"] = nlohmann::json::array();
  for (const auto& spk : manifest.speakers) {
    nlohmann::json js;
    js["id"] = spk.params.id;
    js["role"] = spk.params.role;
    js["f0_hz"] = spk.params.f0_hz;
    js["formants_hz"] = spk.params.formants_hz;
    js["bandwidths_hz"] = spk.params.bandwidths_hz;
    js["utterances"] = nlohmann::json::array();
    for (const auto& u : spk.utterances)
      js["utterances"].push_back({{"path", u.path}, {"split", u.split}});
    j["speakers"].push_back(js);
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed: " + path.string());
}

CorpusManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("bad manifest json: " + std::string(e.what()));
  }
  CorpusManifest manifest;
  try {
    manifest.sample_rate = j.at("sample_rate").get<int>();
    manifest.seed = j.at("seed").get<std::uint64_t>();
    manifest.root = path.parent_path();
    for (const auto& js : j.at("speakers")) {
      CorpusManifest::Speaker spk;
      spk.params.id = js.at("id").get<std::string>();
      spk.params.role = js.at("role").get<std::string>();
      spk.params.f0_hz = js.at("f0_hz").get<double>();
      spk.params.formants_hz = js.at("formants_hz").get<std::vector<double>>();
      spk.params.bandwidths_hz = js.at("bandwidths_hz").get<std::vector<double>>();
      for (const auto& ju : js.at("utterances")) {
        UtteranceEntry u;
        u.path = ju.at("path").get<std::string>();
        u.split = ju.at("split").get<std::string>();
        spk.utterances.push_back(u);
      }
      manifest.speakers.push_back(std::move(spk));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("manifest missing fields: " + std::string(e.what()));
  }
  return manifest;
}

}  // namespace tauwin
