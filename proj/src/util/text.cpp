#include "moviebot/util/text.hpp"

#include <fstream>
#include <sstream>

#include "moviebot/util/errors.hpp"

namespace moviebot {
namespace {

bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z') || c >= 0x80;
}

// Typographic quotes and dashes (U+2013, U+2014, U+2018, U+2019, U+201C,
// U+201D) are punctuation even though their bytes are >= 0x80. Returns the
// sequence length at i, or 0.
std::size_t typographic_punct(std::string_view s, std::size_t i) {
  if (i + 2 >= s.size() || static_cast<unsigned char>(s[i]) != 0xE2 ||
      static_cast<unsigned char>(s[i + 1]) != 0x80) {
    return 0;
  }
  switch (static_cast<unsigned char>(s[i + 2])) {
    case 0x93: case 0x94: case 0x98: case 0x99: case 0x9C: case 0x9D:
      return 3;
    default:
      return 0;
  }
}

bool is_right_single_quote(std::string_view s, std::size_t i) {
  return typographic_punct(s, i) == 3 && static_cast<unsigned char>(s[i + 2]) == 0x99;
}

char lower_ascii(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  const std::size_t n = text.size();
  std::size_t i = 0;
  while (i < n) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (const auto skip = typographic_punct(text, i)) {
      i += skip;
      continue;
    }
    if (!is_word_byte(c)) {
      ++i;
      continue;
    }
    Token tok;
    tok.begin = i;
    tok.capitalized = (c >= 'A' && c <= 'Z');
    while (i < n) {
      const auto ci = static_cast<unsigned char>(text[i]);
      // A curly apostrophe inside a word reads as a plain one.
      if (is_right_single_quote(text, i) && i + 3 < n &&
          is_word_byte(static_cast<unsigned char>(text[i + 3])) &&
          !typographic_punct(text, i + 3)) {
        tok.text.push_back('\'');
        i += 3;
        continue;
      }
      if (typographic_punct(text, i)) break;
      if (is_word_byte(ci)) {
        tok.text.push_back(lower_ascii(static_cast<char>(ci)));
        ++i;
      } else if (ci == '\'' && i + 1 < n &&
                 is_word_byte(static_cast<unsigned char>(text[i + 1]))) {
        tok.text.push_back('\'');
        ++i;
      } else {
        break;
      }
    }
    tok.end = i;
    out.push_back(std::move(tok));
  }
  return out;
}

std::vector<std::string> tokenize_words(std::string_view text) {
  std::vector<std::string> out;
  for (auto& t : tokenize(text)) out.push_back(std::move(t.text));
  return out;
}

std::string normalize_phrase(std::string_view text) {
  return join(tokenize_words(text), " ");
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  return join_range(parts, 0, parts.size(), sep);
}

std::string join_range(const std::vector<std::string>& parts, std::size_t begin,
                       std::size_t end, std::string_view sep) {
  std::string out;
  for (std::size_t i = begin; i < end && i < parts.size(); ++i) {
    if (i > begin) out.append(sep);
    out.append(parts[i]);
  }
  return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.emplace_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r' || s[b] == '\n'))
    ++b;
  while (e > b &&
         (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r' || s[e - 1] == '\n'))
    --e;
  return s.substr(b, e - b);
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = lower_ascii(c);
  return out;
}

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace moviebot
