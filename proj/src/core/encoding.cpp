#include "moviebot/core/encoding.hpp"

namespace moviebot {

std::string_view name(EncoderKind kind) {
  return kind == EncoderKind::kBasic ? "basic" : "with_intents";
}

std::optional<EncoderKind> parse_encoder_kind(std::string_view s) {
  if (s == "basic") return EncoderKind::kBasic;
  if (s == "with_intents") return EncoderKind::kWithIntents;
  return std::nullopt;
}

bool should_make_offer(const DialogueState& state) {
  return state.filled_slots() >= 1 && !state.has_outstanding_recommendation();
}

std::vector<double> encode_state_basic(const DialogueState& state, int max_turns) {
  std::vector<double> bits(kBasicFeatureCount, 0.0);
  const auto filled = state.filled_slots();
  bits[0] = state.is_first_turn;
  bits[1] = !state.recommended_items.empty();
  bits[2] = should_make_offer(state);
  bits[3] = state.last_recommendation_rejected() && !state.accepted;
  bits[4] = state.accepted;
  bits[5] = state.no_results;
  bits[6] = filled == 0;
  bits[7] = filled == 1 || filled == 2;
  bits[8] = filled >= 3;
  bits[9] = state.turn_count >= max_turns;
  return bits;
}

std::vector<double> encode_state_with_intents(const DialogueState& state, int max_turns) {
  auto bits = encode_state_basic(state, max_turns);
  bits.resize(kWithIntentsFeatureCount, 0.0);
  if (state.last_user_intent) {
    bits[kBasicFeatureCount + index_of(*state.last_user_intent)] = 1.0;
  }
  if (state.last_agent_intent) {
    bits[kBasicFeatureCount + kNumUserIntents + index_of(*state.last_agent_intent)] = 1.0;
  }
  return bits;
}

std::vector<double> encode_state(const DialogueState& state, EncoderKind kind,
                                 int max_turns) {
  return kind == EncoderKind::kBasic ? encode_state_basic(state, max_turns)
                                     : encode_state_with_intents(state, max_turns);
}

}  // namespace moviebot
