#include "moviebot/nlu/rule_parser.hpp"

#include <algorithm>

#include "moviebot/util/errors.hpp"
#include "moviebot/util/text.hpp"

namespace moviebot::nlu {

std::vector<IntentPattern> parse_intent_patterns(const std::string& content) {
  std::vector<IntentPattern> out;
  std::size_t lineno = 0;
  for (const auto& raw : split(content, '\n')) {
    ++lineno;
    std::string line = raw;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || trim(line).front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError("pattern line needs INTENT<TAB>regex", lineno);
    const auto intent = parse_user_intent(trim(std::string_view(line).substr(0, tab)));
    if (!intent) throw ParseError("unknown intent in pattern file", lineno);
    std::string source = line.substr(tab + 1);
    try {
      out.push_back({*intent, source, std::regex(source, std::regex::ECMAScript)});
    } catch (const std::regex_error& e) {
      throw ParseError(std::string("bad regex: ") + e.what(), lineno);
    }
  }
  return out;
}

std::vector<IntentPattern> load_intent_patterns(const std::string& path) {
  return parse_intent_patterns(read_file(path));
}

RuleBasedNlu::RuleBasedNlu(std::shared_ptr<const Lexicons> lexicons,
                           std::vector<IntentPattern> patterns)
    : lexicons_(std::move(lexicons)), patterns_(std::move(patterns)) {
  if (!lexicons_) throw ConfigError("rule parser needs lexicons");
  max_phrase_ = lexicons_->max_phrase_tokens();
}

namespace {

struct Quote {
  std::size_t begin, end;  // byte range of the quoted content
};

std::vector<Quote> find_quotes(std::string_view text) {
  static const std::string_view kOpen[] = {"\"", "\xE2\x80\x9C"};
  static const std::string_view kClose[] = {"\"", "\xE2\x80\x9D"};
  std::vector<Quote> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t best = std::string_view::npos, which = 0;
    for (std::size_t q = 0; q < 2; ++q) {
      const auto at = text.find(kOpen[q], pos);
      if (at < best) {
        best = at;
        which = q;
      }
    }
    if (best == std::string_view::npos) break;
    const std::size_t start = best + kOpen[which].size();
    std::size_t close = std::string_view::npos;
    for (auto c : kClose) close = std::min(close, text.find(c, start));
    if (close == std::string_view::npos) break;
    out.push_back({start, close});
    pos = close + 1;
    while (pos < text.size() && (static_cast<unsigned char>(text[pos]) & 0xC0) == 0x80) ++pos;
  }
  return out;
}

}  // namespace

std::vector<SlotValue> RuleBasedNlu::extract_slots(std::string_view text,
                                                   const std::vector<Token>& toks) const {
  const auto& lex = *lexicons_;
  std::vector<std::string> words;
  for (const auto& t : toks) words.push_back(t.text);
  std::vector<bool> claimed(words.size(), false);
  std::vector<SlotValue> out;

  auto add = [&](Slot slot, std::size_t b, std::size_t e) {
    SlotValue sv;
    sv.slot = slot;
    sv.value = join_range(words, b, e);
    sv.polarity = polarity_for_span(words, {b, e});
    sv.span = TokenSpan{b, e};
    out.push_back(std::move(sv));
    for (std::size_t i = b; i < e; ++i) claimed[i] = true;
  };

  for (const auto& q : find_quotes(text)) {
    std::size_t b = words.size(), e = 0;
    for (std::size_t i = 0; i < toks.size(); ++i) {
      if (toks[i].begin >= q.begin && toks[i].end <= q.end) {
        b = std::min(b, i);
        e = std::max(e, i + 1);
      }
    }
    if (b < e) add(Slot::kTitle, b, e);
  }

  struct Candidate {
    Slot slot;
    const std::set<std::string>* set;
    std::size_t min_len;
  };
  const Candidate sources[] = {{Slot::kGenre, &lex.genres, 1},
                               {Slot::kActor, &lex.actors, 1},
                               {Slot::kDirector, &lex.directors, 1},
                               {Slot::kKeyword, &lex.keywords, 1},
                               {Slot::kTitle, &lex.titles, 2}};

  std::size_t i = 0;
  while (i < words.size()) {
    if (claimed[i]) {
      ++i;
      continue;
    }
    if (is_year_token(words[i]) && !lex.stopped(words[i])) {
      add(Slot::kYear, i, i + 1);
      ++i;
      continue;
    }
    std::size_t best_len = 0;
    Slot best_slot = Slot::kGenre;
    std::size_t limit = 0;
    while (limit < max_phrase_ && i + limit < words.size() && !claimed[i + limit]) ++limit;
    for (std::size_t len = limit; len >= 1 && best_len == 0; --len) {
      const auto phrase = join_range(words, i, i + len);
      if (lex.stopped(phrase)) continue;
      for (const auto& c : sources) {
        if (len >= c.min_len && c.set->count(phrase)) {
          best_len = len;
          best_slot = c.slot;
          break;
        }
      }
    }
    if (best_len == 0) {
      ++i;
      continue;
    }
    add(best_slot, i, i + best_len);
    i += best_len;
  }
  std::sort(out.begin(), out.end(),
            [](const SlotValue& a, const SlotValue& b) { return a.span->begin < b.span->begin; });
  return out;
}

NluOutput RuleBasedNlu::parse(std::string_view text) const {
  NluOutput out;
  out.act = make_user_act(UserIntent::kUnk);
  const auto toks = tokenize(text);
  if (toks.empty()) return out;
  std::vector<std::string> words;
  for (const auto& t : toks) words.push_back(t.text);
  const std::string joined = join(words, " ");

  UserIntent intent = UserIntent::kUnk;
  for (const auto& p : patterns_) {
    if (std::regex_search(joined, p.re)) {
      intent = p.intent;
      break;
    }
  }
  DialogueAct act = make_user_act(intent);
  switch (slot_constraint(intent)) {
    case SlotConstraint::kSlotRequired:
      act.slot_values = extract_slots(text, toks);
      if (act.slot_values.empty()) act = make_user_act(UserIntent::kUnk);
      break;
    case SlotConstraint::kUnconstrained:
      if (intent == UserIntent::kInquire) act.requested = requested_slots_from_cues(words);
      break;
    case SlotConstraint::kSlotFree:
      break;
  }
  out.act = std::move(act);
  out.intent_score = 1.0;
  return out;
}

}  // namespace moviebot::nlu
