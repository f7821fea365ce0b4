/*
Copyright 2026 the medsim authors
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
you may obtain a copy of the License at

                http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace medsim::text {

/// NFC-normalizes UTF-8 text and rewrites CRLF/CR line endings to LF.
std::string normalize_text(std::string_view utf8);

/// Unicode-aware lowercase (per code point; no locale tailoring).
std::string lower(std::string_view utf8);

std::string trim(std::string_view s);

/// Splits on maximal runs of alphanumeric code points, lowercased.
/// Returned alongside each token is its length in code points.
struct RawToken {
  std::string text;
  int code_points = 0;
};
std::vector<RawToken> split_alnum_lower(std::string_view utf8);

std::vector<std::string> split(std::string_view s, char sep);

std::uint64_t fnv1a64(std::string_view data);

/// "%.9g" formatting used by every deterministic text artifact.
std::string format_g9(double value);

}  // namespace medsim::text
