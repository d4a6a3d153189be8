#include "moviebot/recsys/user_model.hpp"

#include <algorithm>
#include <map>

#include "moviebot/util/errors.hpp"

namespace moviebot {

std::string_view name(Scope scope) {
  return scope == Scope::kShortTerm ? "short_term" : "long_term";
}

std::optional<Scope> parse_scope(std::string_view s) {
  if (s == "short_term") return Scope::kShortTerm;
  if (s == "long_term") return Scope::kLongTerm;
  return std::nullopt;
}

bool UserModel::has_session(std::string_view session_id) const {
  return std::find(sessions.begin(), sessions.end(), session_id) != sessions.end();
}

namespace {

using PairKey = std::pair<Slot, std::string>;

std::vector<PreferenceView> fold(const std::vector<Preference>& events,
                                 std::string_view only_session) {
  std::map<PairKey, const Preference*> latest;
  for (const auto& e : events) {
    if (!only_session.empty() &&
        (e.session_id != only_session || e.scope != Scope::kShortTerm)) {
      continue;
    }
    latest[{e.slot, e.value}] = &e;
  }
  std::vector<PreferenceView> view;
  for (const auto& [key, e] : latest) {
    if (e->removed) continue;
    view.push_back({e->slot, e->value, e->polarity, e->scope});
  }
  return view;
}

}  // namespace

std::vector<PreferenceView> UserModel::current_view() const { return fold(events, {}); }

std::vector<PreferenceView> UserModel::session_view(std::string_view session_id) const {
  return fold(events, session_id);
}

UserModel make_user_model(std::string user_id) {
  UserModel m;
  m.user_id = std::move(user_id);
  return m;
}

UserModel begin_session(const UserModel& model, const std::string& session_id) {
  UserModel next = model;
  if (!next.has_session(session_id)) next.sessions.push_back(session_id);
  return next;
}

UserModel update_user_model(const UserModel& model, const DialogueAct& act,
                            const Utterance& utterance, Scope scope,
                            const std::string& session_id, std::int64_t timestamp) {
  if (model.user_id.empty()) throw UnknownUserError("user model has no user id");
  const auto* intent = std::get_if<UserIntent>(&act.intent);
  if (!intent) throw StateUpdateError("update_user_model expects a user act");

  UserModel next = begin_session(model, session_id);
  const std::string utterance_id = session_id + ":" + std::to_string(utterance.turn_index);
  auto archive = [&] {
    const bool seen = std::any_of(next.utterances.begin(), next.utterances.end(),
                                  [&](const auto& u) { return u.id == utterance_id; });
    if (!seen) next.utterances.push_back({utterance_id, session_id, utterance.text, timestamp});
  };

  switch (*intent) {
    case UserIntent::kReveal:
    case UserIntent::kRemovePreferences: {
      const bool removal = *intent == UserIntent::kRemovePreferences;
      for (const auto& sv : act.slot_values) {
        Preference p;
        p.slot = sv.slot;
        p.value = sv.value;
        p.polarity = sv.polarity;
        p.scope = scope;
        p.session_id = session_id;
        p.source_utterance_id = utterance_id;
        p.timestamp = timestamp;
        p.removed = removal;
        next.events.push_back(std::move(p));
      }
      archive();
      break;
    }
    case UserIntent::kAccept:
    case UserIntent::kReject:
      if (act.item_id) {
        next.reactions.push_back(
            {*act.item_id, *intent == UserIntent::kAccept, session_id, timestamp});
      }
      break;
    default:
      break;
  }
  return next;
}

UserModel promote_preferences(const UserModel& model, const std::string& session_id,
                              std::int64_t timestamp) {
  if (!model.has_session(session_id)) {
    throw UnknownSessionError("unknown session '" + session_id + "'");
  }
  if (std::find(model.promoted_sessions.begin(), model.promoted_sessions.end(),
                session_id) != model.promoted_sessions.end()) {
    return model;
  }
  const auto view = model.session_view(session_id);
  if (view.empty()) return model;
  UserModel next = model;
  for (const auto& v : view) {
    Preference p;
    p.slot = v.slot;
    p.value = v.value;
    p.polarity = v.polarity;
    p.scope = Scope::kLongTerm;
    p.session_id = session_id;
    p.source_utterance_id = "promotion:" + session_id;
    p.timestamp = timestamp;
    next.events.push_back(std::move(p));
  }
  next.promoted_sessions.push_back(session_id);
  return next;
}

namespace {

std::string join_values(std::vector<std::string> values) {
  std::sort(values.begin(), values.end());
  if (values.size() == 1) return values[0];
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += (i + 1 == values.size()) ? " and " : ", ";
    out += values[i];
  }
  return out;
}

std::string statement(Slot slot, bool like, const std::string& values) {
  const std::string verb = like ? "You like " : "You dislike ";
  switch (slot) {
    case Slot::kGenre:
      return verb + values + " movies.";
    case Slot::kActor:
      return verb + "movies with " + values + ".";
    case Slot::kDirector:
      return verb + "movies directed by " + values + ".";
    case Slot::kKeyword:
      return verb + "movies about " + values + ".";
    case Slot::kTitle:
      return verb + values + ".";
    case Slot::kYear:
      return verb + "movies from " + values + ".";
  }
  return {};
}

}  // namespace

std::vector<std::string> summarize_user_model(const UserModel& model) {
  const auto view = model.current_view();
  if (view.empty()) return {std::string(kEmptyModelStatement)};
  std::vector<std::string> out;
  for (auto scope : {Scope::kLongTerm, Scope::kShortTerm}) {
    for (auto slot : kAllSlots) {
      for (int polarity : {+1, -1}) {
        std::vector<std::string> values;
        for (const auto& v : view) {
          if (v.scope == scope && v.slot == slot && v.polarity == polarity) {
            values.push_back(v.value);
          }
        }
        if (!values.empty()) out.push_back(statement(slot, polarity > 0, join_values(values)));
      }
    }
  }
  return out;
}

}  // namespace moviebot
