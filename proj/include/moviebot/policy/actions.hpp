#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "moviebot/core/dialogue_act.hpp"
#include "moviebot/core/state.hpp"
#include "moviebot/recsys/catalog.hpp"

namespace moviebot::policy {

// Fixed action inventory, version 1. Indices are stored in policy files and
// training curves; never reorder.
enum class AgentAction : std::uint8_t {
  kElicitGenre = 0,
  kElicitActor,
  kElicitDirector,
  kElicitKeyword,
  kRecommend,
  kInform,
  kContinueRec,
  kRestart,
  kBye,
};

inline constexpr std::size_t kNumActions = 9;
inline constexpr std::uint32_t kActionInventoryVersion = 1;
inline constexpr std::array<AgentAction, kNumActions> kAllActions = {
    AgentAction::kElicitGenre, AgentAction::kElicitActor,  AgentAction::kElicitDirector,
    AgentAction::kElicitKeyword, AgentAction::kRecommend,  AgentAction::kInform,
    AgentAction::kContinueRec, AgentAction::kRestart,      AgentAction::kBye};

constexpr std::size_t index_of(AgentAction a) { return static_cast<std::size_t>(a); }
AgentAction action_from_index(std::size_t i);  // DimensionError when i >= 9
std::string_view name(AgentAction a);

// Agent act for an action in the current state.
//
//   ELICIT(s)     ELICIT with requested = {s}
//   RECOMMEND     best item for the frame, excluding rejected items (the
//                 outstanding one may be repeated); NO_RESULTS when empty
//   CONTINUE_REC  best item excluding everything already recommended;
//                 NO_RESULTS when empty
//   INFORM        about the last recommended item: the slots the user just
//                 asked for (last_user_act INQUIRE), else genre and director.
//                 With nothing recommended the act still carries no item,
//                 and the tracker rejects it.
//   RESTART       RESTART_ACK
//   BYE           BYE
// Recommendation acts carry title and year slot values for the NLG.
DialogueAct realize_action(AgentAction action, const DialogueState& state,
                           const Catalog& catalog, const DialogueAct* last_user_act = nullptr);

}  // namespace moviebot::policy
