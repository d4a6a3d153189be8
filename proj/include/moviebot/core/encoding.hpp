#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "moviebot/core/state.hpp"

namespace moviebot {

// Markov state encodings consumed by learned policies.
//
// Basic layout (10 bits):
//   0 is_first_turn            5 no_results
//   1 recommendation_made      6 filled_slots == 0
//   2 should_make_offer        7 filled_slots in {1, 2}
//   3 last_rec_rejected        8 filled_slots >= 3
//   4 last_rec_accepted        9 patience_exhausted (turn_count >= max_turns)
//
// The with-intents layout appends a 12-bit one-hot of the last user intent
// and an 8-bit one-hot of the last agent intent (all zero when absent).
enum class EncoderKind : std::uint8_t { kBasic, kWithIntents };

inline constexpr std::size_t kBasicFeatureCount = 10;
inline constexpr std::size_t kWithIntentsFeatureCount =
    kBasicFeatureCount + kNumUserIntents + kNumAgentIntents;

constexpr std::size_t observation_size(EncoderKind kind) {
  return kind == EncoderKind::kBasic ? kBasicFeatureCount : kWithIntentsFeatureCount;
}

std::string_view name(EncoderKind kind);
std::optional<EncoderKind> parse_encoder_kind(std::string_view s);

inline constexpr int kDefaultMaxTurns = 30;

// True iff at least one slot is filled and no recommendation is waiting for
// a reaction.
bool should_make_offer(const DialogueState& state);

std::vector<double> encode_state_basic(const DialogueState& state, int max_turns);
std::vector<double> encode_state_with_intents(const DialogueState& state, int max_turns);
std::vector<double> encode_state(const DialogueState& state, EncoderKind kind,
                                 int max_turns);

}  // namespace moviebot
