#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "moviebot/core/nlg.hpp"
#include "moviebot/core/state.hpp"
#include "moviebot/gateway/auth.hpp"
#include "moviebot/gateway/wire.hpp"
#include "moviebot/nlu/engine.hpp"
#include "moviebot/policy/policies.hpp"
#include "moviebot/recsys/catalog.hpp"
#include "moviebot/recsys/user_store.hpp"

namespace moviebot::gateway {

// Read-only assets shared by every session.
struct ChatAssets {
  std::shared_ptr<const Catalog> catalog;
  std::shared_ptr<const nlu::NluEngine> nlu;
  std::shared_ptr<const policy::Policy> policy;  // cloned per session
  std::shared_ptr<const NlgTemplateTable> templates;
  int max_turns = kDefaultMaxTurns;
};

struct ChatConfig {
  std::chrono::seconds idle_timeout{30 * 60};
  std::uint64_t nlg_seed = 0;
  // Seconds since the epoch; replaceable in tests.
  std::function<std::int64_t()> clock;
};

// The chat pipeline behind every transport: NLU, tracker, policy,
// recommender, NLG, user model. Messages for one session are processed in
// arrival order under that session's lock; different sessions run in
// parallel. Without a user store nothing is ever persisted; anonymous
// sessions never touch the store either way.
class ChatService {
 public:
  ChatService(ChatAssets assets, std::shared_ptr<UserStore> users = nullptr,
              std::shared_ptr<AuthStore> auth = nullptr, ChatConfig cfg = {});

  struct Created {
    std::string session;
    std::vector<WireMessage> messages;  // the WELCOME agent message, seq 1
  };
  Created create_session();

  // agent_message, plus a recommendation message for RECOMMEND acts. A
  // tracker error yields an error message and a soft reset of the session.
  // UnknownSessionError, TerminatedSessionError.
  std::vector<WireMessage> handle_user_message(const std::string& session, std::string_view text);

  // UserExistsError; ConfigError without an auth store.
  void register_user(const std::string& user, const std::string& password);
  // Binds the user and merges their long-term preferences into the frame.
  // UnknownSessionError, UnknownUserError, BadCredentials (session stays
  // as it was).
  WireMessage login(const std::string& session, const std::string& user,
                    const std::string& password);
  // form "raw" or "summary". NotAuthenticated for anonymous sessions.
  WireMessage get_user_model(const std::string& session, const std::string& form);

  // Promotes the session's preferences for a bound user and forgets the
  // session. Unknown ids are ignored.
  void end_session(const std::string& session);
  // Ends sessions idle for longer than the timeout; returns how many.
  std::size_t expire_idle();

  DialogueState state(const std::string& session) const;
  std::optional<std::string> user_of(const std::string& session) const;
  bool terminated(const std::string& session) const;
  std::size_t session_count() const;

  const ChatAssets& assets() const { return assets_; }

 private:
  struct Session;
  struct UserSlot;

  std::shared_ptr<Session> find(const std::string& id) const;
  std::shared_ptr<UserSlot> user_slot(const std::string& user);
  WireMessage stamp(Session& s, MessageType type, nlohmann::json payload);
  void record_user_act(Session& s, const DialogueAct& act, const Utterance& u);
  void finish(Session& s);
  std::int64_t now() const;

  ChatAssets assets_;
  std::shared_ptr<UserStore> users_;
  std::shared_ptr<AuthStore> auth_;
  ChatConfig cfg_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::map<std::string, std::shared_ptr<UserSlot>> user_slots_;
};

// JSON view of a dialogue state (frame, recommendations, flags).
nlohmann::json state_to_json(const DialogueState& s);

}  // namespace moviebot::gateway
