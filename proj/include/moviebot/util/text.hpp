#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace moviebot {

struct Token {
  std::string text;        // lowercased
  std::size_t begin = 0;   // byte offsets into the source text
  std::size_t end = 0;
  bool capitalized = false;  // first character was upper case before lowering
};

// Canonical tokenizer: lowercase ASCII, split on whitespace and punctuation,
// keep apostrophes only when they sit between two word characters, drop
// punctuation. Bytes >= 0x80 count as word characters so UTF-8 survives.
std::vector<Token> tokenize(std::string_view text);
std::vector<std::string> tokenize_words(std::string_view text);

// tokenize + join with single spaces. Used for every lexicon key and slot
// value so lookups compare like with like.
std::string normalize_phrase(std::string_view text);

std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::string join_range(const std::vector<std::string>& parts, std::size_t begin,
                       std::size_t end, std::string_view sep = " ");
std::vector<std::string> split(std::string_view s, char sep);
std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
bool starts_with(std::string_view s, std::string_view prefix);

// Reads a UTF-8 text file line by line, stripping a trailing '\r'.
std::vector<std::string> read_lines(const std::string& path);
std::string read_file(const std::string& path);

}  // namespace moviebot
