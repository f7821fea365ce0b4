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

#include "medsim/text_util.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <cstdio>

#include "medsim/error.hpp"

namespace medsim::text {

namespace {

icu::UnicodeString to_ustring(std::string_view utf8) {
  return icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
}

std::string to_utf8(const icu::UnicodeString& us) {
  std::string out;
  us.toUTF8String(out);
  return out;
}

}  // namespace

std::string normalize_text(std::string_view utf8) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) fail(errc::io_error, "ICU NFC normalizer unavailable");

  icu::UnicodeString normalized = nfc->normalize(to_ustring(utf8), status);
  if (U_FAILURE(status)) fail(errc::malformed_line, "text is not valid UTF-8");

  std::string nfc_utf8 = to_utf8(normalized);
  std::string out;
  out.reserve(nfc_utf8.size());
  for (size_t i = 0; i < nfc_utf8.size(); ++i) {
    char c = nfc_utf8[i];
    if (c == '\r') {
      if (i + 1 < nfc_utf8.size() && nfc_utf8[i + 1] == '\n') ++i;
      out.push_back('\n');
    } else {
      out.push_back(c);
    }
  }
  return out;
}

std::string lower(std::string_view utf8) {
  icu::UnicodeString us = to_ustring(utf8);
  icu::UnicodeString out;
  for (int32_t i = 0; i < us.length();) {
    UChar32 c = us.char32At(i);
    out.append(u_tolower(c));
    i += U16_LENGTH(c);
  }
  return to_utf8(out);
}

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<RawToken> split_alnum_lower(std::string_view utf8) {
  std::vector<RawToken> tokens;
  icu::UnicodeString us = to_ustring(utf8);
  icu::UnicodeString current;
  int code_points = 0;
  auto flush = [&] {
    if (code_points > 0) {
      tokens.push_back({to_utf8(current), code_points});
      current.remove();
      code_points = 0;
    }
  };
  for (int32_t i = 0; i < us.length();) {
    UChar32 c = us.char32At(i);
    if (u_isalnum(c)) {
      current.append(u_tolower(c));
      ++code_points;
    } else {
      flush();
    }
    i += U16_LENGTH(c);
  }
  flush();
  return tokens;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  size_t start = 0;
  while (true) {
    size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.emplace_back(s.substr(start));
      break;
    }
    parts.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string format_g9(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  return buf;
}

}  // namespace medsim::text
