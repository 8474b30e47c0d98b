// include/tauwin/wav.h

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

#ifndef TAUWIN_WAV_H_
#define TAUWIN_WAV_H_

#include <filesystem>
#include <vector>

namespace tauwin {

struct WavData {
  int sample_rate = 0;
  std::vector<double> samples;  // mono, scaled to [-1, 1)
};

// PCM 16-bit mono only; other encodings raise FormatError.
WavData read_wav(const std::filesystem::path& path);
void write_wav(const std::filesystem::path& path, const WavData& wav);

}  // namespace tauwin

#endif  // TAUWIN_WAV_H_
