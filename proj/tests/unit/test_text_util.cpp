#include <doctest.h>

#include "medsim/text_util.hpp"

using namespace medsim;

TEST_CASE("normalize_text rewrites CRLF and CR to LF") {
  CHECK(text::normalize_text("a\r\nb\rc\n") == "a\nb\nc\n");
}

TEST_CASE("normalize_text composes combining sequences to NFC") {
  // e + combining acute -> precomposed U+00E9
  CHECK(text::normalize_text("caf\x65\xcc\x81") == "caf\xc3\xa9");
}

TEST_CASE("lower handles non-ASCII letters") {
  CHECK(text::lower("HeLLo") == "hello");
  CHECK(text::lower("\xc3\x89") == "\xc3\xa9");  // E-acute
}

TEST_CASE("split_alnum_lower splits on non-alphanumerics and counts code points") {
  auto tokens = text::split_alnum_lower("Ab1, c-d; \xc3\xa9x!");
  REQUIRE(tokens.size() == 4);
  CHECK(tokens[0].text == "ab1");
  CHECK(tokens[0].code_points == 3);
  CHECK(tokens[1].text == "c");
  CHECK(tokens[2].text == "d");
  CHECK(tokens[3].text == "\xc3\xa9x");
  CHECK(tokens[3].code_points == 2);
}

TEST_CASE("split keeps empty fields") {
  auto parts = text::split("a\t\tb", '\t');
  REQUIRE(parts.size() == 3);
  CHECK(parts[1].empty());
}

TEST_CASE("format_g9 gives nine significant digits") {
  CHECK(text::format_g9(0.5) == "0.5");
  CHECK(text::format_g9(1.0 / 3.0) == "0.333333333");
}
