#include <doctest.h>

#include <fstream>
#include <map>

#include "moviebot/nlu/corpus.hpp"
#include "moviebot/util/errors.hpp"
#include "moviebot/util/text.hpp"
#include "test_support.hpp"

using namespace moviebot;
using namespace moviebot::nlu;

namespace {

const Grammar& grammar() {
  static Grammar g = Grammar::load(testsupport::data_path("nlu/user_grammar.tsv"));
  return g;
}

const Fillers& fillers() {
  static Fillers f = Fillers::from_catalog(*testsupport::bundled_catalog(),
                                           *testsupport::bundled_lexicons());
  return f;
}

}  // namespace

TEST_CASE("grammar covers every intent and slot") {
  CHECK_NOTHROW(grammar().check_coverage());
  const auto neg = grammar().select(UserIntent::kReveal, Slot::kGenre, -1);
  CHECK_FALSE(neg.empty());
  for (const auto* t : neg) CHECK(t->polarity == -1);
}

TEST_CASE("counts per intent and per slot") {
  const auto c = generate_corpus(grammar(), fillers(), 30, 30, 1);
  // Eight slot-free intents plus INQUIRE and UNK; twelve slot combinations.
  CHECK(c.size() == 8 * 30 + 2 * 30 + 12 * 30);
  std::map<UserIntent, std::size_t> per_intent;
  std::map<std::pair<UserIntent, std::string>, std::size_t> per_slot;
  for (const auto& r : c) {
    ++per_intent[r.intent];
    for (const auto& t : r.tags) {
      if (t.rfind("B-", 0) == 0) ++per_slot[{r.intent, t.substr(2)}];
    }
  }
  for (auto i : kAllUserIntents) {
    if (slot_constraint(i) == SlotConstraint::kSlotRequired) {
      CHECK(per_intent[i] == 6 * 30);
    } else {
      CHECK(per_intent[i] == 30);
    }
  }
  for (auto s : kAllSlots) {
    CHECK(per_slot[{UserIntent::kReveal, std::string(name(s))}] == 30);
    CHECK(per_slot[{UserIntent::kRemovePreferences, std::string(name(s))}] == 30);
  }
}

TEST_CASE("generation is deterministic and records are valid") {
  const auto a = generate_corpus(grammar(), fillers(), 5, 7, 42);
  const auto b = generate_corpus(grammar(), fillers(), 5, 7, 42);
  const auto c = generate_corpus(grammar(), fillers(), 5, 7, 43);
  CHECK(a == b);
  CHECK(a != c);
  for (const auto& r : a) CHECK_NOTHROW(validate_record(r));
  CHECK(generate_corpus(grammar(), fillers(), 0, 0, 1).empty());
}

TEST_CASE("gold tags follow the filler") {
  GrammarTemplate t;
  t.intent = UserIntent::kReveal;
  t.text = "something like \"\xC2\xAB" "title\xC2\xBB\" please";
  t.slot = Slot::kTitle;
  const auto r = realize_template(t, "The Lord of the Rings");
  CHECK(r.tags == std::vector<std::string>{"O", "O", "B-title", "I-title", "I-title", "I-title",
                                           "I-title", "O"});
}

TEST_CASE("coverage gaps are reported") {
  const auto g = Grammar::parse("HI\t-\thello\nREVEAL\tgenre\ti like \xC2\xAB" "genre\xC2\xBB\n");
  CHECK_THROWS_AS(g.check_coverage(), GrammarCoverageError);
  CHECK_THROWS_AS(generate_corpus(g, fillers(), 1, 1, 1), GrammarCoverageError);
  CHECK_THROWS_AS(Grammar::parse("HI\tgenre\thello \xC2\xAB" "genre\xC2\xBB\n"), ParseError);
  CHECK_THROWS_AS(Grammar::parse("REVEAL\t-\ti like it\n"), ParseError);
  CHECK_THROWS_AS(Grammar::parse("REVEAL\tgenre\ti like \xC2\xAB" "colour\xC2\xBB\n"), ParseError);
}

TEST_CASE("corpus files round-trip") {
  const auto a = generate_corpus(grammar(), fillers(), 3, 3, 9);
  testsupport::TempDir dir("corpus");
  write_corpus(dir.file("c.tsv"), a);
  CHECK(read_corpus(dir.file("c.tsv")) == a);
  {
    std::ofstream bad(dir.file("bad.tsv"));
    bad << "REVEAL\thello there\tO O\nHI\thi\tO O\n";
  }
  try {
    read_corpus(dir.file("bad.tsv"));
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
  }
}

TEST_CASE("bundled corpus matches the generator") {
  const auto bundled = read_corpus(testsupport::data_path("nlu/corpus_500.tsv"));
  CHECK(bundled.size() == 500);
  CHECK(bundled == generate_corpus(grammar(), fillers(), 20, 25, 2024));
}

TEST_CASE("user acts render to text the rule engine reads back") {
  Rng rng(1);
  auto act = make_user_act(UserIntent::kReveal,
                           {SlotValue{Slot::kGenre, "horror", -1, std::nullopt}});
  const auto text = render_user_text(act, grammar(), rng);
  const auto words = tokenize_words(text);
  CHECK(std::find(words.begin(), words.end(), "horror") != words.end());
  auto inq = make_user_act(UserIntent::kInquire);
  inq.requested = {Slot::kDirector};
  CHECK(render_user_text(inq, grammar(), rng) == "who directed it");
  CHECK(render_user_text(make_user_act(UserIntent::kBye), Grammar::parse("BYE\t-\tbye\n"), rng) ==
        "bye");
  CHECK_THROWS_AS(Grammar::parse("REVEAL\tactor\ti like \xC2\xAB" "genre\xC2\xBB\n"), ParseError);
}

TEST_CASE("first positive genre template") {
  const auto t = grammar().select(UserIntent::kReveal, Slot::kGenre, +1);
  REQUIRE_FALSE(t.empty());
  CHECK(realize_template(*t[0], "comedy").text == "i would like a comedy movie");
}
