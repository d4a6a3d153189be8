#include "moviebot/core/dialogue_act.hpp"

#include <charconv>

namespace moviebot {

bool DialogueAct::is(UserIntent i) const {
  const auto* p = std::get_if<UserIntent>(&intent);
  return p && *p == i;
}

bool DialogueAct::is(AgentIntent i) const {
  const auto* p = std::get_if<AgentIntent>(&intent);
  return p && *p == i;
}

DialogueAct make_user_act(UserIntent intent, std::vector<SlotValue> values) {
  DialogueAct act;
  act.intent = intent;
  act.slot_values = std::move(values);
  return act;
}

DialogueAct make_agent_act(AgentIntent intent, std::vector<SlotValue> values) {
  DialogueAct act;
  act.intent = intent;
  act.slot_values = std::move(values);
  return act;
}

bool is_valid_year_value(const std::string& value) {
  std::string digits = value;
  bool decade = false;
  if (digits.size() == 5 && digits.back() == 's') {
    digits.pop_back();
    decade = true;
  }
  if (digits.size() != 4) return false;
  int year = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), year);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) return false;
  if (decade && year % 10 != 0) return false;
  return year >= 1900 && year <= 2100;
}

std::string validate_act(const DialogueAct& act, std::optional<std::size_t> token_count) {
  for (const auto& sv : act.slot_values) {
    if (sv.polarity != 1 && sv.polarity != -1) return "polarity must be +1 or -1";
    if (sv.slot == Slot::kYear && !is_valid_year_value(sv.value)) {
      return "year value '" + sv.value + "' is not a year in [1900, 2100]";
    }
    if (sv.span) {
      if (sv.span->begin >= sv.span->end) return "empty span";
      if (token_count && sv.span->end > *token_count) return "span out of bounds";
    }
  }
  if (const auto* ui = std::get_if<UserIntent>(&act.intent)) {
    switch (slot_constraint(*ui)) {
      case SlotConstraint::kSlotRequired:
        if (act.slot_values.empty()) {
          return std::string(name(*ui)) + " requires at least one slot value";
        }
        break;
      case SlotConstraint::kSlotFree:
        if (!act.slot_values.empty()) {
          return std::string(name(*ui)) + " carries no slot values";
        }
        break;
      case SlotConstraint::kUnconstrained:
        break;
    }
  }
  return {};
}

std::string describe(const DialogueAct& act) {
  std::string out = name(act.intent);
  out += "(";
  bool first = true;
  for (const auto& sv : act.slot_values) {
    if (!first) out += ", ";
    first = false;
    out += std::string(name(sv.slot)) + "=" + sv.value;
    if (sv.polarity < 0) out += " [-]";
  }
  for (auto s : act.requested) {
    if (!first) out += ", ";
    first = false;
    out += std::string(name(s)) + "=?";
  }
  if (act.item_id) {
    if (!first) out += ", ";
    out += "item=" + *act.item_id;
  }
  out += ")";
  return out;
}

}  // namespace moviebot
