#include "moviebot/core/state.hpp"

#include <algorithm>

#include "moviebot/util/errors.hpp"

namespace moviebot {

std::size_t DialogueState::filled_slots() const {
  return static_cast<std::size_t>(
      std::count_if(frame.begin(), frame.end(), [](const auto& v) { return !v.empty(); }));
}

const RecommendedItem* DialogueState::last_recommendation() const {
  return recommended_items.empty() ? nullptr : &recommended_items.back();
}

bool DialogueState::has_outstanding_recommendation() const {
  const auto* last = last_recommendation();
  return last && last->reaction == Reaction::kNone;
}

bool DialogueState::last_recommendation_rejected() const {
  const auto* last = last_recommendation();
  return last && last->reaction == Reaction::kRejected;
}

std::vector<std::string> DialogueState::recommended_ids() const {
  std::vector<std::string> ids;
  for (const auto& r : recommended_items) ids.push_back(r.item_id);
  return ids;
}

std::vector<std::string> DialogueState::rejected_ids() const {
  std::vector<std::string> ids;
  for (const auto& r : recommended_items) {
    if (r.reaction == Reaction::kRejected) ids.push_back(r.item_id);
  }
  return ids;
}

void merge_preference(Frame& frame, Slot slot, const std::string& value, int polarity) {
  auto& entries = frame[index_of(slot)];
  auto it = std::find_if(entries.begin(), entries.end(),
                         [&](const FrameEntry& e) { return e.value == value; });
  if (it != entries.end()) {
    it->polarity = polarity;
  } else {
    entries.push_back({value, polarity});
  }
}

namespace {

void clear_dialogue(DialogueState& s) {
  for (auto& entries : s.frame) entries.clear();
  s.recommended_items.clear();
  s.accepted = false;
  s.no_results = false;
}

void apply_user(DialogueState& s, const DialogueAct& act, UserIntent intent) {
  switch (intent) {
    case UserIntent::kReveal:
      for (const auto& sv : act.slot_values) {
        merge_preference(s.frame, sv.slot, sv.value, sv.polarity);
      }
      s.no_results = false;
      break;
    case UserIntent::kRemovePreferences:
      for (const auto& sv : act.slot_values) {
        auto& entries = s.frame[index_of(sv.slot)];
        auto it = std::find_if(entries.begin(), entries.end(),
                               [&](const FrameEntry& e) { return e.value == sv.value; });
        if (it == entries.end()) {
          throw StateUpdateError("REMOVE_PREFERENCES names " + std::string(name(sv.slot)) +
                                 "=" + sv.value + ", which is not in the frame");
        }
        entries.erase(it);
      }
      s.no_results = false;
      break;
    case UserIntent::kAccept:
    case UserIntent::kReject: {
      if (!s.has_outstanding_recommendation()) {
        throw StateUpdateError(std::string(name(intent)) +
                               " without an outstanding recommendation");
      }
      auto& last = s.recommended_items.back();
      if (intent == UserIntent::kAccept) {
        last.reaction = Reaction::kAccepted;
        s.accepted = true;
      } else {
        last.reaction = Reaction::kRejected;
      }
      break;
    }
    case UserIntent::kRestart:
      clear_dialogue(s);
      break;
    case UserIntent::kBye:
      s.terminated = true;
      break;
    default:
      break;
  }
  s.last_user_intent = intent;
}

void apply_agent(DialogueState& s, const DialogueAct& act, AgentIntent intent) {
  switch (intent) {
    case AgentIntent::kRecommend:
      if (!act.item_id) throw StateUpdateError("RECOMMEND without an item");
      s.recommended_items.push_back({*act.item_id, Reaction::kNone});
      s.no_results = false;
      break;
    case AgentIntent::kInform:
      if (s.recommended_items.empty()) {
        throw StateUpdateError("INFORM before any recommendation was made");
      }
      break;
    case AgentIntent::kNoResults:
      s.no_results = true;
      break;
    case AgentIntent::kRestartAck:
      clear_dialogue(s);
      break;
    case AgentIntent::kBye:
      s.terminated = true;
      break;
    default:
      break;
  }
  s.last_agent_intent = intent;
}

}  // namespace

DialogueState update_state(const DialogueState& state, const DialogueAct& act,
                           Speaker speaker) {
  if (state.terminated) throw StateUpdateError("dialogue already terminated");
  if (speaker_of(act.intent) != speaker) {
    throw StateUpdateError("intent " + name(act.intent) + " does not match speaker role");
  }
  DialogueState next = state;
  if (speaker == Speaker::kUser) {
    apply_user(next, act, std::get<UserIntent>(act.intent));
  } else {
    apply_agent(next, act, std::get<AgentIntent>(act.intent));
  }
  next.turn_count = state.turn_count + 1;
  next.is_first_turn = false;
  return next;
}

}  // namespace moviebot
