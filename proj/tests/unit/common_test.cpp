#include <random>
#include <string>

#include "doctest.h"
#include "hg/common/clock.hpp"
#include "hg/common/ids.hpp"
#include "hg/common/text.hpp"

using namespace hg;

TEST_CASE("word_count examples") {
  CHECK(text::word_count("") == 0);
  CHECK(text::word_count("Detective Opal considered her seargant.") == 5);
  CHECK(text::word_count("a  b\n c") == 3);
  CHECK(text::word_count(" \t\r\n") == 0);
}

TEST_CASE("word_count ignores whitespace shape") {
  std::mt19937_64 rng(7);
  const char ws[] = {' ', '\t', '\n', '\r'};
  for (int iter = 0; iter < 500; ++iter) {
    std::string messy;
    std::string clean;
    const int words = static_cast<int>(rng() % 12);
    auto spaces = [&] {
      std::string s;
      const int n = 1 + static_cast<int>(rng() % 4);
      for (int i = 0; i < n; ++i) s += ws[rng() % 4];
      return s;
    };
    if (rng() % 2) messy += spaces();
    for (int w = 0; w < words; ++w) {
      std::string word(1 + rng() % 6, static_cast<char>('a' + rng() % 26));
      if (w > 0) {
        messy += spaces();
        clean += ' ';
      }
      messy += word;
      clean += word;
    }
    if (rng() % 2) messy += spaces();
    REQUIRE(text::word_count(messy) == static_cast<std::size_t>(words));
    REQUIRE(text::word_count(messy) == text::word_count(clean));
    REQUIRE(text::split_words(messy).size() == static_cast<std::size_t>(words));
  }
}

TEST_CASE("utf8 offsets count code points") {
  const std::string s = "a\xC3\xA9" "b";  // a é b
  CHECK(text::utf8_length(s) == 3);
  CHECK(text::utf8_byte_offset(s, 0) == 0);
  CHECK(text::utf8_byte_offset(s, 2) == 3);
  CHECK(text::utf8_byte_offset(s, 3) == 4);
  CHECK(text::utf8_byte_offset(s, 4) == std::string::npos);
}

TEST_CASE("iso8601 round trip") {
  CHECK(format_iso8601(0) == "1970-01-01T00:00:00.000Z");
  CHECK(format_iso8601(1556971200250) == "2019-05-04T12:00:00.250Z");
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const Millis t = static_cast<Millis>(rng() % 4102444800000ULL);
    const auto parsed = parse_iso8601(format_iso8601(t));
    REQUIRE(parsed.has_value());
    REQUIRE(*parsed == t);
  }
  CHECK_FALSE(parse_iso8601("2019-05-04 12:00:00").has_value());
}

TEST_CASE("manual clock never moves backwards") {
  ManualClock clock(1000, 5);
  CHECK(clock.now() == 1000);
  CHECK(clock.now() == 1005);
  CHECK_FALSE(clock.set(0));
  CHECK(clock.set(5000));
  CHECK(clock.peek() == 5000);
}

TEST_CASE("id allocator commits on observe") {
  IdAllocator ids("ch");
  CHECK(ids.peek() == "ch-1");
  CHECK(ids.peek() == "ch-1");
  ids.observe("ch-1");
  CHECK(ids.peek() == "ch-2");
  ids.observe("ch-9");
  ids.observe("team-40");
  CHECK(ids.peek() == "ch-10");
}
