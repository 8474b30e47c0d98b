// src/config.cc

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

#include "tauwin/config.h"

#include <fstream>
#include <sstream>

#include "tauwin/errors.h"

namespace tauwin {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

int to_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad integer for " + key + ": '" + value + "'");
  }
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad number for " + key + ": '" + value + "'");
  }
}

}  // namespace

bool parse_bool(const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError("bad boolean: '" + text + "'");
}

KeyValueMap parse_config_text(const std::string& text) {
  KeyValueMap kv;
  std::istringstream in(text);
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("bad section header at line " + std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected key=value at line " + std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key at line " + std::to_string(lineno));
    kv[section.empty() ? key : section + "." + key] = value;
  }
  return kv;
}

KeyValueMap parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void apply_override(KeyValueMap& kv, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override must look like section.key=value: '" + assignment + "'");
  kv[trim(assignment.substr(0, eq))] = trim(assignment.substr(eq + 1));
}

void apply_mfcc_keys(const KeyValueMap& kv, MfccConfig* config) {
  for (const auto& [key, value] : kv) {
    if (key.rfind("mfcc.", 0) != 0) continue;
    const std::string name = key.substr(5);
    if (name == "sample_rate") config->sample_rate = to_int(key, value);
    else if (name == "frame_len_ms") config->frame_len_ms = to_double(key, value);
    else if (name == "frame_shift_ms") config->frame_shift_ms = to_double(key, value);
    else if (name == "num_filters") config->num_filters = to_int(key, value);
    else if (name == "num_ceps") config->num_ceps = to_int(key, value);
    else if (name == "preemphasis") config->preemphasis = to_double(key, value);
    else if (name == "deltas") config->deltas = parse_bool(value);
    else if (name == "delta_context") config->delta_context = to_int(key, value);
    else if (name == "fft_size") config->fft_size = static_cast<std::size_t>(to_int(key, value));
    else if (name == "energy_floor") config->energy_floor = to_double(key, value);
    else if (name == "vad_percentile") config->vad_percentile = to_double(key, value);
    else if (name == "window_base") config->window.base = window_base_from_name(value);
    else if (name == "window_order") config->window.order = to_int(key, value);
    else if (name == "multitaper") config->multitaper_tapers = to_int(key, value);
    else throw ConfigError("unknown mfcc key: " + key);
  }
  config->window.length = config->frame_samples();
}

}  // namespace tauwin
