#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "moviebot/core/dialogue_act.hpp"
#include "moviebot/recsys/catalog.hpp"

namespace moviebot::nlu {

// Normalized phrase sets used by the rule-based parser, the feature encoder
// and the corpus generator. Catalog-derived entries are merged with the
// optional lexicon files (one UTF-8 entry per line):
//   genres.txt    extra genre names
//   keywords.txt  extra keywords
//   stoplist.txt  phrases never accepted as a slot value
struct Lexicons {
  std::set<std::string> genres;
  std::set<std::string> actors;
  std::set<std::string> directors;
  std::set<std::string> keywords;
  std::set<std::string> titles;
  std::set<std::string> stoplist;

  static Lexicons from_catalog(const Catalog& catalog);
  static Lexicons load(const std::string& dir, const Catalog& catalog);

  bool stopped(const std::string& phrase) const { return stoplist.count(phrase) > 0; }
  std::size_t max_phrase_tokens() const;
};

struct PhraseMatch {
  TokenSpan span;
  std::string phrase;
};

// Greedy leftmost-longest non-overlapping matches of lexicon phrases over a
// token sequence. Stoplisted phrases never match.
std::vector<PhraseMatch> match_phrases(const std::vector<std::string>& tokens,
                                       const std::set<std::string>& lexicon,
                                       const std::set<std::string>& stoplist,
                                       std::size_t max_len, std::size_t min_len = 1);

// Negation cues checked in the three tokens preceding a slot span.
inline constexpr std::size_t kNegationWindow = 3;
bool is_negation_cue(const std::string& token);
int polarity_for_span(const std::vector<std::string>& tokens, const TokenSpan& span);

// Slots an INQUIRE utterance asks about, from cue words ("directed" ->
// director, "stars" -> actor, ...). Vocabulary order, deduplicated.
std::vector<Slot> requested_slots_from_cues(const std::vector<std::string>& tokens);

// Year-like token: four digits in [1900, 2100], or a decade such as 1990s.
bool is_year_token(const std::string& token);

}  // namespace moviebot::nlu
