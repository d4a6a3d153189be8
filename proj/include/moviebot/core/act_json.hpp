#pragma once

#include <json.hpp>

#include "moviebot/core/dialogue_act.hpp"

namespace moviebot {

// {"intent": "REVEAL", "speaker": "user", "slot_values": [{"slot", "value",
// "polarity", "span": [b, e]}], "requested": [...], "item_id", "count"}.
// Optional members are omitted when absent.
nlohmann::json act_to_json(const DialogueAct& act);
// ParseError on unknown intents or slots or malformed members.
DialogueAct act_from_json(const nlohmann::json& j);

nlohmann::json utterance_to_json(const Utterance& u);

}  // namespace moviebot
