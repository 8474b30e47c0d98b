// include/tauwin/corpus.h

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

#ifndef TAUWIN_CORPUS_H_
#define TAUWIN_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace tauwin {

struct SynthCorpusSpec {
  int num_speakers = 10;
  int utterances_per_speaker = 5;
  double utterance_seconds = 4.0;
  int sample_rate = 8000;
  std::uint64_t seed = 1;
  void validate() const;  // throws ConfigError
};

// One randomized source-filter voice: fixed formant resonators and pitch
// range per speaker, re-excited per utterance.
struct SpeakerParams {
  std::string id;
  std::string role;  // "background" (UBM pool) or "target"
  double f0_hz = 0.0;
  std::vector<double> formants_hz;
  std::vector<double> bandwidths_hz;
};

struct UtteranceEntry {
  std::string path;   // relative to the corpus root
  std::string split;  // "ubm", "enroll", or "test"
};

struct CorpusManifest {
  int sample_rate = 0;
  std::uint64_t seed = 0;
  std::filesystem::path root;  // directory holding manifest.json; not serialized
  struct Speaker {
    SpeakerParams params;
    std::vector<UtteranceEntry> utterances;
  };
  std::vector<Speaker> speakers;
};

// Writes WAV utterances plus manifest.json under out_dir; fully
// deterministic for a given spec (including the seed).
CorpusManifest synth_corpus(const SynthCorpusSpec& spec, const std::filesystem::path& out_dir);

void write_manifest(const CorpusManifest& manifest, const std::filesystem::path& path);
CorpusManifest read_manifest(const std::filesystem::path& path);

// Deterministic single-utterance synthesis; exposed for tests.
std::vector<double> synth_utterance(const SpeakerParams& voice, double seconds, int sample_rate,
                                    std::uint64_t seed, int speaker_index, int utterance_index);

}  // namespace tauwin

#endif  // TAUWIN_CORPUS_H_
