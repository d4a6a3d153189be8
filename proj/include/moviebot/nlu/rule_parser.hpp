#pragma once

#include <memory>
#include <regex>
#include <string>
#include <vector>

#include "moviebot/nlu/engine.hpp"
#include "moviebot/nlu/lexicon.hpp"
#include "moviebot/recsys/catalog.hpp"
#include "moviebot/util/text.hpp"

namespace moviebot::nlu {

struct IntentPattern {
  UserIntent intent;
  std::string source;
  std::regex re;
};

// Pattern file: INTENT<TAB>regex per line, '#' comments, tried in file
// order against the space-joined token string. Throws ParseError with the
// line number on an unknown intent or a bad regex.
std::vector<IntentPattern> load_intent_patterns(const std::string& path);
std::vector<IntentPattern> parse_intent_patterns(const std::string& content);

// Pattern/lexicon engine.
//
// Intent: first matching pattern; UNK when none matches or the text is
// empty. Slots (REVEAL and REMOVE_PREFERENCES only): quoted titles first,
// then a left-to-right longest match over year tokens and the genre,
// person, keyword and full-title lexicons. At equal length the priority is
// year, genre, person, keyword, title. Unquoted titles need two or more
// tokens. Stoplisted phrases never match. A slot-required intent with no
// slot found becomes UNK.
class RuleBasedNlu : public NluEngine {
 public:
  RuleBasedNlu(std::shared_ptr<const Lexicons> lexicons, std::vector<IntentPattern> patterns);

  NluOutput parse(std::string_view text) const override;
  std::string_view name() const override { return "rule"; }

 private:
  std::vector<SlotValue> extract_slots(std::string_view text,
                                       const std::vector<Token>& tokens) const;

  std::shared_ptr<const Lexicons> lexicons_;
  std::vector<IntentPattern> patterns_;
  std::size_t max_phrase_;
};

}  // namespace moviebot::nlu
