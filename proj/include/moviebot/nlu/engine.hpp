#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "moviebot/core/dialogue_act.hpp"
#include "moviebot/nlu/tags.hpp"

namespace moviebot::nlu {

struct NluOutput {
  DialogueAct act;
  double intent_score = 0.0;
  double sequence_score = 0.0;
};

// Both engines are immutable after construction; parse is safe to call
// concurrently.
class NluEngine {
 public:
  virtual ~NluEngine() = default;
  virtual NluOutput parse(std::string_view text) const = 0;
  virtual std::string_view name() const = 0;
};

// Builds a user act from tokens and BIO tags: spans become slot values
// (tokens joined by spaces) with negation-window polarity; INQUIRE gets its
// requested slots from cue words. Slot-free intents drop any spans.
DialogueAct act_from_tags(UserIntent intent, const std::vector<std::string>& tokens,
                          const TagSet& tags, const std::vector<int>& seq);

}  // namespace moviebot::nlu
