#include <doctest.h>

#include "moviebot/nlu/rule_parser.hpp"
#include "moviebot/util/errors.hpp"
#include "test_support.hpp"

using namespace moviebot;
using namespace moviebot::nlu;

namespace {

const RuleBasedNlu& engine() {
  static RuleBasedNlu e(testsupport::bundled_lexicons(),
                        load_intent_patterns(testsupport::data_path("nlu/intent_patterns.tsv")));
  return e;
}

bool has(const DialogueAct& act, Slot s, const std::string& v, int polarity = 1) {
  for (const auto& sv : act.slot_values) {
    if (sv.slot == s && sv.value == v && sv.polarity == polarity) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("reveal with genre and year") {
  const auto out = engine().parse("i want an action movie from 1995");
  CHECK(out.act.is(UserIntent::kReveal));
  CHECK(out.act.slot_values.size() == 2);
  CHECK(has(out.act, Slot::kGenre, "action"));
  CHECK(has(out.act, Slot::kYear, "1995"));
  CHECK(validate_act(out.act, 7).empty());
}

TEST_CASE("empty input is UNK") {
  CHECK(engine().parse("").act.is(UserIntent::kUnk));
  CHECK(engine().parse("   ").act.slot_values.empty());
}

TEST_CASE("inquire requests a slot without filling values") {
  const auto out = engine().parse("who directed it");
  CHECK(out.act.is(UserIntent::kInquire));
  CHECK(out.act.requested == std::vector<Slot>{Slot::kDirector});
  CHECK(out.act.slot_values.empty());
}

TEST_CASE("negation window sets polarity") {
  const auto out = engine().parse("no horror please");
  CHECK(out.act.is(UserIntent::kReveal));
  CHECK(has(out.act, Slot::kGenre, "horror", -1));
  CHECK(has(engine().parse("I don't want anything with Tom Cruise").act, Slot::kActor,
            "tom cruise", +1));  // cue is four tokens back
  CHECK(has(engine().parse("i hate Tom Cruise").act, Slot::kActor, "tom cruise", -1));
}

TEST_CASE("ambiguous conversational phrases are not slots") {
  // "sounds like" is a catalog keyword and "No Thank You" a catalog title.
  CHECK(engine().parse("that sounds like fun").act.is(UserIntent::kUnk));
  CHECK(engine().parse("no thank you").act.is(UserIntent::kDeny));
  const auto out = engine().parse("sounds like a comedy would be nice");
  CHECK(out.act.is(UserIntent::kReveal));
  CHECK(out.act.slot_values.size() == 1);
  CHECK(has(out.act, Slot::kGenre, "comedy"));
}

TEST_CASE("titles need two tokens unless quoted") {
  CHECK(engine().parse("i liked up").act.is(UserIntent::kUnk));
  CHECK(has(engine().parse("i liked \"Up\"").act, Slot::kTitle, "up"));
  CHECK(has(engine().parse("something like the matrix").act, Slot::kTitle, "the matrix"));
  CHECK(has(engine().parse("something like \xE2\x80\x9CHeat\xE2\x80\x9D").act, Slot::kTitle,
            "heat"));
}

TEST_CASE("longest match and people lexicons") {
  const auto out = engine().parse("a science fiction film directed by Christopher Nolan");
  CHECK(has(out.act, Slot::kGenre, "science fiction"));
  CHECK(has(out.act, Slot::kDirector, "christopher nolan"));
  CHECK(has(engine().parse("something with Keanu Reeves").act, Slot::kActor, "keanu reeves"));
  CHECK(has(engine().parse("a movie about time travel").act, Slot::kKeyword, "time travel"));
  CHECK(has(engine().parse("something from the 1990s").act, Slot::kYear, "1990s"));
}

TEST_CASE("intent priorities") {
  CHECK(engine().parse("hi").act.is(UserIntent::kHi));
  CHECK(engine().parse("hi i want a comedy").act.is(UserIntent::kReveal));
  CHECK(engine().parse("forget about horror").act.is(UserIntent::kRemovePreferences));
  CHECK(has(engine().parse("forget about horror").act, Slot::kGenre, "horror"));
  CHECK(engine().parse("let's start over").act.is(UserIntent::kRestart));
  CHECK(engine().parse("sounds good").act.is(UserIntent::kAccept));
  CHECK(engine().parse("i've already seen it").act.is(UserIntent::kReject));
  CHECK(engine().parse("show me more").act.is(UserIntent::kContinue));
  CHECK(engine().parse("ok").act.is(UserIntent::kAcknowledge));
  CHECK(engine().parse("nope").act.is(UserIntent::kDeny));
  CHECK(engine().parse("goodbye").act.is(UserIntent::kBye));
  CHECK(engine().parse("forget it").act.is(UserIntent::kUnk));  // nothing to remove
}

TEST_CASE("pattern file errors carry line numbers") {
  try {
    parse_intent_patterns("# c\nHI\t^hi$\nFOO\tbar\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(parse_intent_patterns("HI\t(unclosed\n"), ParseError);
  CHECK_THROWS_AS(parse_intent_patterns("HI no tab\n"), ParseError);
}
