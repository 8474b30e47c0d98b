// src/wav.cc

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

#include "tauwin/wav.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "tauwin/errors.h"

namespace tauwin {

namespace {

std::uint32_t read_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16le(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32le(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_u16le(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace

WavData read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw FormatError("not a RIFF/WAVE file: " + path.string());

  WavData wav;
  bool have_fmt = false;
  int channels = 0, bits = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
    const std::uint32_t size = read_u32le(bytes.data() + pos + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size()) throw FormatError("truncated chunk in " + path.string());
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (size < 16) throw FormatError("short fmt chunk");
      const std::uint16_t format = read_u16le(bytes.data() + body);
      channels = read_u16le(bytes.data() + body + 2);
      wav.sample_rate = static_cast<int>(read_u32le(bytes.data() + body + 4));
      bits = read_u16le(bytes.data() + body + 14);
      if (format != 1) throw FormatError("only PCM wav is supported");
      if (channels != 1) throw FormatError("only mono wav is supported");
      if (bits != 16) throw FormatError("only 16-bit wav is supported");
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      if (!have_fmt) throw FormatError("data chunk before fmt chunk");
      const std::size_t count = size / 2;
      wav.samples.resize(count);
      for (std::size_t i = 0; i < count; ++i) {
        const std::int16_t s = static_cast<std::int16_t>(read_u16le(bytes.data() + body + 2 * i));
        wav.samples[i] = static_cast<double>(s) / 32768.0;
      }
      return wav;
    }
    pos = body + size + (size & 1);  // chunks are word aligned
  }
  throw FormatError("no data chunk in " + path.string());
}

void write_wav(const std::filesystem::path& path, const WavData& wav) {
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(wav.samples.size() * 2);
  std::string out;
  out.reserve(44 + data_bytes);
  out.append("RIFF");
  put_u32le(out, 36 + data_bytes);
  out.append("WAVE");
  out.append("fmt ");
  put_u32le(out, 16);
  put_u16le(out, 1);  // PCM
  put_u16le(out, 1);  // mono
  put_u32le(out, static_cast<std::uint32_t>(wav.sample_rate));
  put_u32le(out, static_cast<std::uint32_t>(wav.sample_rate * 2));
  put_u16le(out, 2);
  put_u16le(out, 16);
  out.append("data");
  put_u32le(out, data_bytes);
  for (double v : wav.samples) {
    const double clamped = std::clamp(v, -1.0, 1.0);
    const auto s = static_cast<std::int16_t>(
        std::clamp<long>(std::lround(clamped * 32767.0), -32768, 32767));
    put_u16le(out, static_cast<std::uint16_t>(s));
  }
  std::ofstream fout(path, std::ios::binary | std::ios::trunc);
  if (!fout) throw IoError("cannot write " + path.string());
  fout.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!fout) throw IoError("write failed: " + path.string());
}

}  // namespace tauwin
