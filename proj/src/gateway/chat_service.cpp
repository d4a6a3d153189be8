#include "moviebot/gateway/chat_service.hpp"

#include "moviebot/core/act_json.hpp"
#include "moviebot/policy/actions.hpp"
#include "moviebot/recsys/recommender.hpp"
#include "moviebot/util/errors.hpp"
#include "moviebot/util/rng.hpp"

namespace moviebot::gateway {

using nlohmann::json;

struct ChatService::Session {
  std::mutex mu;
  std::string id;
  std::optional<std::string> user;
  std::unique_ptr<policy::Policy> policy;
  DialogueState state;
  DialogueAct last_user_act;
  std::uint64_t seq = 0;
  int utterances = 0;
  bool terminated = false;
  std::int64_t last_active = 0;
};

struct ChatService::UserSlot {
  std::mutex mu;
  UserModel model;
  bool loaded = false;
  std::int64_t last_ts = 0;
};

ChatService::ChatService(ChatAssets assets, std::shared_ptr<UserStore> users,
                         std::shared_ptr<AuthStore> auth, ChatConfig cfg)
    : assets_(std::move(assets)), users_(std::move(users)), auth_(std::move(auth)), cfg_(std::move(cfg)) {
  if (!assets_.catalog || !assets_.nlu || !assets_.policy || !assets_.templates) {
    throw ConfigError("chat service needs a catalog, an NLU engine, a policy and NLG templates");
  }
  assets_.templates->validate();
}

std::int64_t ChatService::now() const {
  if (cfg_.clock) return cfg_.clock();
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::shared_ptr<ChatService::Session> ChatService::find(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw UnknownSessionError("unknown session '" + id + "'");
  return it->second;
}

std::shared_ptr<ChatService::UserSlot> ChatService::user_slot(const std::string& user) {
  std::lock_guard lock(mu_);
  auto& slot = user_slots_[user];
  if (!slot) slot = std::make_shared<UserSlot>();
  return slot;
}

WireMessage ChatService::stamp(Session& s, MessageType type, json payload) {
  return WireMessage{type, s.id, std::move(payload), ++s.seq};
}

namespace {

json agent_payload(const DialogueAct& act, const std::string& text) {
  return {{"text", text}, {"act", act_to_json(act)}};
}

json item_json(const Item& item) {
  return {{"id", item.id},           {"title", item.title},   {"year", item.year},
          {"genres", item.genres},   {"director", item.director}, {"actors", item.actors},
          {"keywords", item.keywords}, {"rating", item.rating}};
}

}  // namespace

ChatService::Created ChatService::create_session() {
  expire_idle();
  auto s = std::make_shared<Session>();
  s->id = random_hex(16);
  s->policy = assets_.policy->clone();
  s->policy->begin_episode(cfg_.nlg_seed);
  s->last_active = now();
  const auto welcome = make_agent_act(AgentIntent::kWelcome);
  s->state = update_state(s->state, welcome, Speaker::kAgent);
  const auto text = generate_response(welcome, s->state, *assets_.templates,
                                      mix_seed(cfg_.nlg_seed, s->seq + 1));
  Created out{s->id, {}};
  out.messages.push_back(stamp(*s, MessageType::kAgentMessage, agent_payload(welcome, text)));
  std::lock_guard lock(mu_);
  sessions_[s->id] = s;
  return out;
}

void ChatService::record_user_act(Session& s, const DialogueAct& act, const Utterance& u) {
  if (!s.user || !users_) return;
  auto slot = user_slot(*s.user);
  std::lock_guard lock(slot->mu);
  slot->last_ts = std::max(slot->last_ts, now());
  slot->model = update_user_model(slot->model, act, u, Scope::kShortTerm, s.id, slot->last_ts);
  users_->persist(slot->model);
}

void ChatService::finish(Session& s) {
  s.terminated = true;
  if (!s.user || !users_) return;
  auto slot = user_slot(*s.user);
  std::lock_guard lock(slot->mu);
  if (!slot->model.has_session(s.id)) return;
  slot->last_ts = std::max(slot->last_ts, now());
  slot->model = promote_preferences(slot->model, s.id, slot->last_ts);
  users_->persist(slot->model);
}

std::vector<WireMessage> ChatService::handle_user_message(const std::string& session,
                                                          std::string_view text) {
  auto sp = find(session);
  auto& s = *sp;
  std::lock_guard lock(s.mu);
  if (s.terminated) throw TerminatedSessionError("session '" + session + "' has ended");
  s.last_active = now();
  std::vector<WireMessage> out;

  DialogueAct act = assets_.nlu->parse(text).act;
  if ((act.is(UserIntent::kAccept) || act.is(UserIntent::kReject)) &&
      s.state.has_outstanding_recommendation()) {
    act.item_id = s.state.last_recommendation()->item_id;
  }
  const Utterance utt{Speaker::kUser, std::string(text), {act}, s.utterances + 1};
  try {
    s.state = update_state(s.state, act, Speaker::kUser);
    ++s.utterances;
    s.last_user_act = act;
    record_user_act(s, act, utt);
    if (!s.state.terminated) {
      const auto action = s.policy->act(s.state);
      const auto agent_act = policy::realize_action(action, s.state, *assets_.catalog, &act);
      s.state = update_state(s.state, agent_act, Speaker::kAgent);
      ++s.utterances;
      const auto reply = generate_response(agent_act, s.state, *assets_.templates,
                                           mix_seed(cfg_.nlg_seed, s.seq + 1));
      out.push_back(stamp(s, MessageType::kAgentMessage, agent_payload(agent_act, reply)));
      if (agent_act.is(AgentIntent::kRecommend) && agent_act.item_id) {
        if (const Item* item = assets_.catalog->find(*agent_act.item_id)) {
          out.push_back(stamp(s, MessageType::kRecommendation,
                              {{"item", item_json(*item)},
                               {"explanation", explain_recommendation(*assets_.catalog, *item,
                                                                      s.state.frame)}}));
        }
      }
    } else {
      out.push_back(stamp(s, MessageType::kSystem, {{"event", "session_ended"}}));
    }
    if (s.state.terminated) {
      finish(s);
      if (out.back().type != MessageType::kSystem) {
        out.push_back(stamp(s, MessageType::kSystem, {{"event", "session_ended"}}));
      }
    }
  } catch (const StateUpdateError& e) {
    // Soft reset: keep the session and its user binding, drop the dialogue.
    DialogueState fresh;
    fresh.is_first_turn = false;
    fresh.turn_count = 1;
    s.state = fresh;
    out.push_back(stamp(s, MessageType::kError, {{"code", "state_update"}, {"message", e.what()}}));
    out.push_back(stamp(s, MessageType::kSystem, {{"event", "session_reset"}}));
  }
  return out;
}

void ChatService::register_user(const std::string& user, const std::string& password) {
  if (!auth_) throw ConfigError("this server has no credential store");
  auth_->register_user(user, password);
  if (users_) users_->create(user);
}

WireMessage ChatService::login(const std::string& session, const std::string& user,
                               const std::string& password) {
  if (!auth_) throw ConfigError("this server has no credential store");
  auto sp = find(session);
  auth_->verify(user, password);
  auto& s = *sp;
  std::lock_guard lock(s.mu);
  s.user = user;
  s.last_active = now();
  auto slot = user_slot(user);
  std::lock_guard ulock(slot->mu);
  if (!slot->loaded) {
    if (users_) {
      users_->create(user);
      slot->model = users_->load(user);
    } else {
      slot->model = make_user_model(user);
    }
    slot->loaded = true;
  }
  slot->model = begin_session(slot->model, s.id);
  std::size_t merged = 0;
  for (const auto& v : slot->model.current_view()) {
    if (v.scope != Scope::kLongTerm) continue;
    merge_preference(s.state.frame, v.slot, v.value, v.polarity);
    ++merged;
  }
  return stamp(s, MessageType::kSystem,
               {{"event", "logged_in"}, {"user", user}, {"merged_preferences", merged}});
}

WireMessage ChatService::get_user_model(const std::string& session, const std::string& form) {
  auto sp = find(session);
  auto& s = *sp;
  std::lock_guard lock(s.mu);
  if (!s.user) throw NotAuthenticated("log in to see your user model");
  if (form != "raw" && form != "summary") throw ConfigError("form must be raw or summary");
  auto slot = user_slot(*s.user);
  std::lock_guard ulock(slot->mu);
  json payload = {{"form", form}, {"user", *s.user}};
  if (form == "summary") {
    payload["statements"] = summarize_user_model(slot->model);
  } else {
    json prefs = json::array();
    for (const auto& v : slot->model.current_view()) {
      prefs.push_back({{"slot", name(v.slot)},
                       {"value", v.value},
                       {"polarity", v.polarity},
                       {"scope", name(v.scope)}});
    }
    payload["preferences"] = std::move(prefs);
    payload["utterances"] = slot->model.utterances.size();
  }
  return stamp(s, MessageType::kUserModel, std::move(payload));
}

void ChatService::end_session(const std::string& session) {
  std::shared_ptr<Session> sp;
  {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(session);
    if (it == sessions_.end()) return;
    sp = it->second;
    sessions_.erase(it);
  }
  std::lock_guard lock(sp->mu);
  if (!sp->terminated) finish(*sp);
}

std::size_t ChatService::expire_idle() {
  const auto cutoff = now() - cfg_.idle_timeout.count();
  std::vector<std::string> idle;
  {
    std::lock_guard lock(mu_);
    for (const auto& [id, s] : sessions_) {
      if (s->last_active < cutoff) idle.push_back(id);
    }
  }
  for (const auto& id : idle) end_session(id);
  return idle.size();
}

DialogueState ChatService::state(const std::string& session) const {
  auto sp = find(session);
  std::lock_guard lock(sp->mu);
  return sp->state;
}

std::optional<std::string> ChatService::user_of(const std::string& session) const {
  auto sp = find(session);
  std::lock_guard lock(sp->mu);
  return sp->user;
}

bool ChatService::terminated(const std::string& session) const {
  auto sp = find(session);
  std::lock_guard lock(sp->mu);
  return sp->terminated;
}

std::size_t ChatService::session_count() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

json state_to_json(const DialogueState& s) {
  json frame = json::object();
  for (auto slot : kAllSlots) {
    const auto& entries = s.frame[index_of(slot)];
    if (entries.empty()) continue;
    json list = json::array();
    for (const auto& e : entries) list.push_back({{"value", e.value}, {"polarity", e.polarity}});
    frame[std::string(name(slot))] = std::move(list);
  }
  json recs = json::array();
  for (const auto& r : s.recommended_items) {
    recs.push_back({{"item", r.item_id},
                    {"reaction", r.reaction == Reaction::kNone       ? "none"
                                 : r.reaction == Reaction::kAccepted ? "accepted"
                                                                     : "rejected"}});
  }
  json j = {{"frame", std::move(frame)},
            {"recommended_items", std::move(recs)},
            {"turn_count", s.turn_count},
            {"is_first_turn", s.is_first_turn},
            {"accepted", s.accepted},
            {"no_results", s.no_results},
            {"terminated", s.terminated}};
  j["last_user_intent"] = s.last_user_intent ? json(name(*s.last_user_intent)) : json(nullptr);
  j["last_agent_intent"] = s.last_agent_intent ? json(name(*s.last_agent_intent)) : json(nullptr);
  return j;
}

}  // namespace moviebot::gateway
