#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace moviebot {

// Encoding order is versioned (see data/config/vocabulary.txt). Do not
// reorder: one-hot state encodings and serialized models depend on it.
enum class UserIntent : std::uint8_t {
  kReveal,
  kInquire,
  kRemovePreferences,
  kAccept,
  kReject,
  kContinue,
  kRestart,
  kHi,
  kBye,
  kAcknowledge,
  kDeny,
  kUnk,
};
inline constexpr std::size_t kNumUserIntents = 12;

enum class AgentIntent : std::uint8_t {
  kWelcome,
  kElicit,
  kRecommend,
  kInform,
  kNoResults,
  kCountResults,
  kRestartAck,
  kBye,
};
inline constexpr std::size_t kNumAgentIntents = 8;

enum class Slot : std::uint8_t {
  kGenre,
  kDirector,
  kActor,
  kKeyword,
  kTitle,
  kYear,
};
inline constexpr std::size_t kNumSlots = 6;

inline constexpr int kVocabularyVersion = 1;

enum class Speaker : std::uint8_t { kUser, kAgent };

using Intent = std::variant<UserIntent, AgentIntent>;

inline constexpr std::array<UserIntent, kNumUserIntents> kAllUserIntents = {
    UserIntent::kReveal,      UserIntent::kInquire, UserIntent::kRemovePreferences,
    UserIntent::kAccept,      UserIntent::kReject,  UserIntent::kContinue,
    UserIntent::kRestart,     UserIntent::kHi,      UserIntent::kBye,
    UserIntent::kAcknowledge, UserIntent::kDeny,    UserIntent::kUnk};

inline constexpr std::array<AgentIntent, kNumAgentIntents> kAllAgentIntents = {
    AgentIntent::kWelcome,   AgentIntent::kElicit,       AgentIntent::kRecommend,
    AgentIntent::kInform,    AgentIntent::kNoResults,    AgentIntent::kCountResults,
    AgentIntent::kRestartAck, AgentIntent::kBye};

inline constexpr std::array<Slot, kNumSlots> kAllSlots = {
    Slot::kGenre, Slot::kDirector, Slot::kActor,
    Slot::kKeyword, Slot::kTitle, Slot::kYear};

constexpr std::size_t index_of(UserIntent i) { return static_cast<std::size_t>(i); }
constexpr std::size_t index_of(AgentIntent i) { return static_cast<std::size_t>(i); }
constexpr std::size_t index_of(Slot s) { return static_cast<std::size_t>(s); }

std::string_view name(UserIntent intent);
std::string_view name(AgentIntent intent);
std::string_view name(Slot slot);
std::string name(const Intent& intent);

std::optional<UserIntent> parse_user_intent(std::string_view s);
std::optional<AgentIntent> parse_agent_intent(std::string_view s);
std::optional<Slot> parse_slot(std::string_view s);

Speaker speaker_of(const Intent& intent);

// Slot-bearing constraint class of a user intent. REVEAL and
// REMOVE_PREFERENCES must carry >= 1 slot; the conversational intents carry
// none; INQUIRE and UNK are free.
enum class SlotConstraint : std::uint8_t { kUnconstrained, kSlotFree, kSlotRequired };
SlotConstraint slot_constraint(UserIntent intent);

// Verifies a vocabulary config file lists exactly the compiled-in symbols in
// encoding order. Throws VocabularyError on any mismatch.
void verify_vocabulary_file(const std::string& path);

}  // namespace moviebot
