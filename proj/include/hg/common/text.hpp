#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace hg::text {

// Whitespace is exactly space, tab, newline and carriage return.
constexpr bool is_space(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

// Maximal non-whitespace runs, in order. Views point into `text`.
std::vector<std::string_view> split_words(std::string_view text);

std::size_t word_count(std::string_view text);

std::string trim(std::string_view text);

std::string to_lower_ascii(std::string_view text);

// Document offsets count Unicode code points of UTF-8 text.
std::size_t utf8_length(std::string_view text);

// Byte offset of code point `index`; index == utf8_length(text) maps to
// text.size(). Returns npos when out of range.
std::size_t utf8_byte_offset(std::string_view text, std::size_t index);

}  // namespace hg::text
