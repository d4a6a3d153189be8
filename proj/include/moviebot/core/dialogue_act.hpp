#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "moviebot/core/vocab.hpp"

namespace moviebot {

// Half-open token range [begin, end) in the source utterance.
struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool operator==(const TokenSpan&) const = default;
};

struct SlotValue {
  Slot slot = Slot::kGenre;
  std::string value;  // normalized; for year an integer or a decade like "1990s"
  int polarity = +1;
  std::optional<TokenSpan> span;

  bool operator==(const SlotValue&) const = default;
};

struct DialogueAct {
  Intent intent = UserIntent::kUnk;
  std::vector<SlotValue> slot_values;
  // Slots asked about without a value: INQUIRE on the user side, ELICIT on
  // the agent side.
  std::vector<Slot> requested;
  // Item a RECOMMEND/INFORM refers to, or the item an ACCEPT/REJECT reacts to.
  std::optional<std::string> item_id;
  std::optional<int> count;

  bool operator==(const DialogueAct&) const = default;

  bool is(UserIntent i) const;
  bool is(AgentIntent i) const;
};

DialogueAct make_user_act(UserIntent intent, std::vector<SlotValue> values = {});
DialogueAct make_agent_act(AgentIntent intent, std::vector<SlotValue> values = {});

struct Utterance {
  Speaker speaker = Speaker::kUser;
  std::string text;
  std::vector<DialogueAct> acts;
  int turn_index = 0;
};

bool is_valid_year_value(const std::string& value);

// Checks the slot-vocabulary and per-intent slot constraints. When
// token_count is given, spans must lie inside [0, token_count).
// Returns an empty string when valid, else a description of the violation.
std::string validate_act(const DialogueAct& act,
                         std::optional<std::size_t> token_count = std::nullopt);

std::string describe(const DialogueAct& act);

}  // namespace moviebot
