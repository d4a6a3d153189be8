#include "moviebot/nlu/engine.hpp"

#include "moviebot/nlu/lexicon.hpp"
#include "moviebot/util/text.hpp"

namespace moviebot::nlu {

DialogueAct act_from_tags(UserIntent intent, const std::vector<std::string>& tokens,
                          const TagSet& tags, const std::vector<int>& seq) {
  DialogueAct act = make_user_act(intent);
  if (slot_constraint(intent) != SlotConstraint::kSlotFree) {
    for (const auto& s : spans_from_tags(tags, seq)) {
      SlotValue sv;
      sv.slot = s.slot;
      sv.value = join_range(tokens, s.span.begin, s.span.end);
      sv.polarity = polarity_for_span(tokens, s.span);
      sv.span = s.span;
      act.slot_values.push_back(std::move(sv));
    }
  }
  if (intent == UserIntent::kInquire) act.requested = requested_slots_from_cues(tokens);
  return act;
}

}  // namespace moviebot::nlu
