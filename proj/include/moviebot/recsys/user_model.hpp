#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "moviebot/core/dialogue_act.hpp"

namespace moviebot {

enum class Scope : std::uint8_t { kShortTerm, kLongTerm };
std::string_view name(Scope scope);
std::optional<Scope> parse_scope(std::string_view s);

// One entry of the append-only preference log. A removal is a tombstone
// (removed = true); the view drops the pair until it is revealed again.
struct Preference {
  Slot slot = Slot::kGenre;
  std::string value;
  int polarity = +1;
  Scope scope = Scope::kShortTerm;
  std::string session_id;
  std::string source_utterance_id;
  std::int64_t timestamp = 0;
  bool removed = false;

  bool operator==(const Preference&) const = default;
};

struct ArchivedUtterance {
  std::string id;
  std::string session_id;
  std::string text;
  std::int64_t timestamp = 0;
  bool operator==(const ArchivedUtterance&) const = default;
};

struct ItemReaction {
  std::string item_id;
  bool accepted = false;
  std::string session_id;
  std::int64_t timestamp = 0;
  bool operator==(const ItemReaction&) const = default;
};

struct PreferenceView {
  Slot slot = Slot::kGenre;
  std::string value;
  int polarity = +1;
  Scope scope = Scope::kShortTerm;
  bool operator==(const PreferenceView&) const = default;
};

// Event-sourced user model. Every list is append-only; the preference view
// is derived from the log on demand.
struct UserModel {
  std::string user_id;
  std::vector<std::string> sessions;
  std::vector<Preference> events;
  std::vector<ArchivedUtterance> utterances;
  std::vector<ItemReaction> reactions;
  std::vector<std::string> promoted_sessions;

  bool operator==(const UserModel&) const = default;

  bool has_session(std::string_view session_id) const;

  // Latest event per (slot, value) wins; tombstoned pairs are dropped.
  // Ordered by slot, then value.
  std::vector<PreferenceView> current_view() const;

  // View restricted to events from one session's short-term scope.
  std::vector<PreferenceView> session_view(std::string_view session_id) const;
};

UserModel make_user_model(std::string user_id);

// Registers a session so events can reference it. Idempotent.
UserModel begin_session(const UserModel& model, const std::string& session_id);

// Applies a user act: REVEAL appends preferences and archives the raw
// utterance, REMOVE_PREFERENCES appends tombstones, ACCEPT/REJECT record
// act.item_id. Throws UnknownUserError for a model without a user id.
UserModel update_user_model(const UserModel& model, const DialogueAct& act,
                            const Utterance& utterance, Scope scope,
                            const std::string& session_id, std::int64_t timestamp);

// Copies the session's short-term view into long-term scope. Idempotent per
// session. Throws UnknownSessionError for an unregistered session.
UserModel promote_preferences(const UserModel& model, const std::string& session_id,
                              std::int64_t timestamp);

// Statements grouped by scope (long-term first), slot order, polarity
// (likes first), values sorted.
std::vector<std::string> summarize_user_model(const UserModel& model);

inline constexpr std::string_view kEmptyModelStatement = "I don't know your preferences yet.";

}  // namespace moviebot
