// include/tauwin/config.h

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

#ifndef TAUWIN_CONFIG_H_
#define TAUWIN_CONFIG_H_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "tauwin/features.h"

namespace tauwin {

// Flat key=value text with [section] headers and '#' comments.  Keys are
// flattened to "section.key".
using KeyValueMap = std::map<std::string, std::string>;

KeyValueMap parse_config_text(const std::string& text);
KeyValueMap parse_config_file(const std::filesystem::path& path);

// "section.key=value" override strings, e.g. from repeated CLI flags.
void apply_override(KeyValueMap& kv, const std::string& assignment);

// Applies "mfcc.*" keys; unknown keys under that section raise ConfigError.
// The window length is kept in sync with the frame size afterwards.
void apply_mfcc_keys(const KeyValueMap& kv, MfccConfig* config);

bool parse_bool(const std::string& text);  // throws ConfigError

}  // namespace tauwin

#endif  // TAUWIN_CONFIG_H_
