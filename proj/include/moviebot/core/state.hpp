#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "moviebot/core/dialogue_act.hpp"
#include "moviebot/core/vocab.hpp"

namespace moviebot {

struct FrameEntry {
  std::string value;
  int polarity = +1;
  bool operator==(const FrameEntry&) const = default;
};

// Collected preferences, one list per slot in vocabulary order. A value
// appears at most once per slot.
using Frame = std::array<std::vector<FrameEntry>, kNumSlots>;

enum class Reaction : std::uint8_t { kNone, kAccepted, kRejected };

struct RecommendedItem {
  std::string item_id;
  Reaction reaction = Reaction::kNone;
  bool operator==(const RecommendedItem&) const = default;
};

struct DialogueState {
  Frame frame;
  std::vector<RecommendedItem> recommended_items;
  int turn_count = 0;
  bool is_first_turn = true;
  bool accepted = false;
  bool no_results = false;
  bool terminated = false;
  std::optional<UserIntent> last_user_intent;
  std::optional<AgentIntent> last_agent_intent;

  bool operator==(const DialogueState&) const = default;

  // Number of slots with at least one frame entry.
  std::size_t filled_slots() const;
  bool has_outstanding_recommendation() const;
  bool last_recommendation_rejected() const;
  const RecommendedItem* last_recommendation() const;
  std::vector<std::string> recommended_ids() const;
  std::vector<std::string> rejected_ids() const;
};

// Merges one preference into a frame with latest-polarity-wins semantics.
void merge_preference(Frame& frame, Slot slot, const std::string& value, int polarity);

// Pure transition of the state tracker. Throws StateUpdateError when the act
// cannot be applied to the state (reacting to a recommendation that was
// never made, removing an absent preference, informing with nothing
// recommended, speaking after termination, wrong speaker role).
DialogueState update_state(const DialogueState& state, const DialogueAct& act,
                           Speaker speaker);

}  // namespace moviebot
