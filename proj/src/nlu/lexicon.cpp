#include "moviebot/nlu/lexicon.hpp"

#include <algorithm>
#include <filesystem>

#include "moviebot/util/text.hpp"

namespace moviebot::nlu {

namespace fs = std::filesystem;

Lexicons Lexicons::from_catalog(const Catalog& catalog) {
  Lexicons lex;
  for (const auto& [g, _] : catalog.genre_index()) lex.genres.insert(g);
  for (const auto& [a, _] : catalog.actor_index()) lex.actors.insert(a);
  for (const auto& [d, _] : catalog.director_index()) lex.directors.insert(d);
  for (const auto& [k, _] : catalog.keyword_index()) lex.keywords.insert(k);
  for (const auto& [t, _] : catalog.title_index()) lex.titles.insert(t);
  return lex;
}

Lexicons Lexicons::load(const std::string& dir, const Catalog& catalog) {
  Lexicons lex = from_catalog(catalog);
  auto merge = [&](const char* file, std::set<std::string>& into) {
    const auto path = fs::path(dir) / file;
    if (!fs::exists(path)) return;
    for (const auto& line : read_lines(path.string())) {
      auto t = trim(line);
      if (t.empty() || t.front() == '#') continue;
      into.insert(normalize_phrase(t));
    }
  };
  merge("genres.txt", lex.genres);
  merge("keywords.txt", lex.keywords);
  merge("stoplist.txt", lex.stoplist);
  return lex;
}

std::size_t Lexicons::max_phrase_tokens() const {
  std::size_t best = 1;
  for (const auto* set : {&genres, &actors, &directors, &keywords, &titles}) {
    for (const auto& p : *set) {
      best = std::max(best, static_cast<std::size_t>(std::count(p.begin(), p.end(), ' ') + 1));
    }
  }
  return best;
}

std::vector<PhraseMatch> match_phrases(const std::vector<std::string>& tokens,
                                       const std::set<std::string>& lexicon,
                                       const std::set<std::string>& stoplist,
                                       std::size_t max_len, std::size_t min_len) {
  std::vector<PhraseMatch> out;
  std::size_t i = 0;
  while (i < tokens.size()) {
    bool found = false;
    const std::size_t longest = std::min(max_len, tokens.size() - i);
    for (std::size_t len = longest; len >= std::max<std::size_t>(min_len, 1); --len) {
      auto phrase = join_range(tokens, i, i + len);
      if (lexicon.count(phrase) && !stoplist.count(phrase)) {
        out.push_back({{i, i + len}, std::move(phrase)});
        i += len;
        found = true;
        break;
      }
      if (len == 1) break;
    }
    if (!found) ++i;
  }
  return out;
}

bool is_negation_cue(const std::string& token) {
  return token == "not" || token == "no" || token == "don't" || token == "hate" ||
         token == "dislike";
}

int polarity_for_span(const std::vector<std::string>& tokens, const TokenSpan& span) {
  const std::size_t from = span.begin >= kNegationWindow ? span.begin - kNegationWindow : 0;
  for (std::size_t i = from; i < span.begin && i < tokens.size(); ++i) {
    if (is_negation_cue(tokens[i])) return -1;
  }
  return +1;
}

std::vector<Slot> requested_slots_from_cues(const std::vector<std::string>& tokens) {
  bool want[kNumSlots] = {};
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& t = tokens[i];
    const std::string next = i + 1 < tokens.size() ? tokens[i + 1] : "";
    if (t == "directed" || t == "director" || t == "direct" || t == "made") {
      want[index_of(Slot::kDirector)] = true;
    } else if (t == "stars" || t == "starring" || t == "actor" || t == "actors" ||
               t == "cast" || t == "plays" || (t == "is" && next == "in")) {
      want[index_of(Slot::kActor)] = true;
    } else if (t == "genre" || (t == "kind" && next == "of")) {
      want[index_of(Slot::kGenre)] = true;
    } else if (t == "year" || t == "when" || t == "released") {
      want[index_of(Slot::kYear)] = true;
    } else if (t == "about" || t == "plot" || t == "story") {
      want[index_of(Slot::kKeyword)] = true;
    } else if (t == "called" || t == "title") {
      want[index_of(Slot::kTitle)] = true;
    }
  }
  std::vector<Slot> out;
  for (auto s : kAllSlots) {
    if (want[index_of(s)]) out.push_back(s);
  }
  return out;
}

bool is_year_token(const std::string& token) {
  if (token.size() != 4 && token.size() != 5) return false;
  for (std::size_t i = 0; i < 4; ++i) {
    if (token[i] < '0' || token[i] > '9') return false;
  }
  if (token.size() == 5 && token[4] != 's') return false;
  return is_valid_year_value(token);
}

}  // namespace moviebot::nlu
