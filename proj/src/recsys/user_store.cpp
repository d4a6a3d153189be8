#include "moviebot/recsys/user_store.hpp"

#include <fstream>

#include <json.hpp>

#include "moviebot/util/errors.hpp"
#include "moviebot/util/text.hpp"

namespace moviebot {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kFormatVersion = 1;

std::string hex_encode(const std::string& s) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  for (unsigned char c : s) {
    out.push_back(kDigits[c >> 4]);
    out.push_back(kDigits[c & 0xF]);
  }
  return out;
}

void append_lines(const fs::path& path, const std::vector<std::string>& lines) {
  if (lines.empty()) return;
  std::ofstream out(path, std::ios::app | std::ios::binary);
  if (!out) throw StorageError("cannot open " + path.string() + " for append");
  for (const auto& l : lines) out << l << '\n';
  out.flush();
  if (!out) throw StorageError("write failed on " + path.string());
}

json to_json(const Preference& p) {
  return {{"kind", "preference"}, {"slot", name(p.slot)},      {"value", p.value},
          {"polarity", p.polarity}, {"scope", name(p.scope)},  {"session", p.session_id},
          {"source", p.source_utterance_id}, {"ts", p.timestamp}, {"removed", p.removed}};
}

template <class T>
bool is_prefix(const std::vector<T>& stored, const std::vector<T>& model) {
  if (stored.size() > model.size()) return false;
  return std::equal(stored.begin(), stored.end(), model.begin());
}

}  // namespace

UserStore::UserStore(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_ / "users", ec);
  if (ec) throw StorageError("cannot create store at " + root_.string() + ": " + ec.message());
  const auto index = root_ / "index.jsonl";
  if (!fs::exists(index)) {
    append_lines(index,
                 {json{{"format", "moviebot.user-index"}, {"version", kFormatVersion}}.dump()});
  }
}

fs::path UserStore::user_file(const std::string& user_id) const {
  return root_ / "users" / ("u_" + hex_encode(user_id) + ".jsonl");
}

std::mutex& UserStore::user_mutex(const std::string& user_id) const {
  std::lock_guard lock(registry_mutex_);
  auto& slot = user_mutexes_[user_id];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

bool UserStore::exists(const std::string& user_id) const {
  return fs::exists(user_file(user_id));
}

std::vector<std::string> UserStore::users() const {
  std::vector<std::string> out;
  const auto lines = read_lines((root_ / "index.jsonl").string());
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    out.push_back(json::parse(lines[i]).at("user").get<std::string>());
  }
  return out;
}

void UserStore::ensure_user_file(const std::string& user_id) {
  const auto path = user_file(user_id);
  if (fs::exists(path)) return;
  append_lines(path, {json{{"format", "moviebot.user-log"},
                           {"version", kFormatVersion},
                           {"user", user_id}}
                          .dump()});
  std::lock_guard lock(index_mutex_);
  append_lines(root_ / "index.jsonl",
               {json{{"user", user_id}, {"file", path.filename().string()}}.dump()});
}

void UserStore::create(const std::string& user_id) {
  if (user_id.empty()) throw StorageError("empty user id");
  std::lock_guard lock(user_mutex(user_id));
  ensure_user_file(user_id);
}

UserModel UserStore::read_log(const std::string& user_id) const {
  const auto path = user_file(user_id);
  if (!fs::exists(path)) throw UnknownUserError("unknown user '" + user_id + "'");
  const auto lines = read_lines(path.string());
  if (lines.empty()) throw StorageError("missing header in " + path.string());
  UserModel m = make_user_model(user_id);
  try {
    const auto header = json::parse(lines[0]);
    if (header.at("format") != "moviebot.user-log" || header.at("version") != kFormatVersion) {
      throw StorageError("unsupported user log format in " + path.string());
    }
    for (std::size_t i = 1; i < lines.size(); ++i) {
      if (trim(lines[i]).empty()) continue;
      const auto j = json::parse(lines[i]);
      const auto kind = j.at("kind").get<std::string>();
      if (kind == "session") {
        m.sessions.push_back(j.at("id").get<std::string>());
      } else if (kind == "preference") {
        Preference p;
        auto slot = parse_slot(j.at("slot").get<std::string>());
        auto scope = parse_scope(j.at("scope").get<std::string>());
        if (!slot || !scope) throw ParseError("bad preference record", i + 1);
        p.slot = *slot;
        p.scope = *scope;
        p.value = j.at("value").get<std::string>();
        p.polarity = j.at("polarity").get<int>();
        p.session_id = j.at("session").get<std::string>();
        p.source_utterance_id = j.at("source").get<std::string>();
        p.timestamp = j.at("ts").get<std::int64_t>();
        p.removed = j.at("removed").get<bool>();
        m.events.push_back(std::move(p));
      } else if (kind == "utterance") {
        m.utterances.push_back({j.at("id").get<std::string>(), j.at("session").get<std::string>(),
                                j.at("text").get<std::string>(), j.at("ts").get<std::int64_t>()});
      } else if (kind == "reaction") {
        m.reactions.push_back({j.at("item").get<std::string>(), j.at("accepted").get<bool>(),
                               j.at("session").get<std::string>(),
                               j.at("ts").get<std::int64_t>()});
      } else if (kind == "promotion") {
        m.promoted_sessions.push_back(j.at("session").get<std::string>());
      } else {
        throw ParseError("unknown record kind '" + kind + "'", i + 1);
      }
    }
  } catch (const json::exception& e) {
    throw StorageError("corrupt user log " + path.string() + ": " + e.what());
  }
  return m;
}

UserModel UserStore::load(const std::string& user_id) const {
  std::lock_guard lock(user_mutex(user_id));
  return read_log(user_id);
}

void UserStore::persist(const UserModel& model) {
  if (model.user_id.empty()) throw UnknownUserError("cannot persist an anonymous model");
  std::lock_guard lock(user_mutex(model.user_id));
  ensure_user_file(model.user_id);
  const UserModel stored = read_log(model.user_id);
  if (!is_prefix(stored.sessions, model.sessions) || !is_prefix(stored.events, model.events) ||
      !is_prefix(stored.utterances, model.utterances) ||
      !is_prefix(stored.reactions, model.reactions) ||
      !is_prefix(stored.promoted_sessions, model.promoted_sessions)) {
    throw StorageError("stored log for '" + model.user_id +
                       "' is not a prefix of the model being persisted");
  }
  std::vector<std::string> lines;
  for (std::size_t i = stored.sessions.size(); i < model.sessions.size(); ++i) {
    lines.push_back(json{{"kind", "session"}, {"id", model.sessions[i]}}.dump());
  }
  for (std::size_t i = stored.events.size(); i < model.events.size(); ++i) {
    lines.push_back(to_json(model.events[i]).dump());
  }
  for (std::size_t i = stored.utterances.size(); i < model.utterances.size(); ++i) {
    const auto& u = model.utterances[i];
    lines.push_back(json{{"kind", "utterance"}, {"id", u.id}, {"session", u.session_id},
                         {"text", u.text}, {"ts", u.timestamp}}
                        .dump());
  }
  for (std::size_t i = stored.reactions.size(); i < model.reactions.size(); ++i) {
    const auto& r = model.reactions[i];
    lines.push_back(json{{"kind", "reaction"}, {"item", r.item_id}, {"accepted", r.accepted},
                         {"session", r.session_id}, {"ts", r.timestamp}}
                        .dump());
  }
  for (std::size_t i = stored.promoted_sessions.size(); i < model.promoted_sessions.size(); ++i) {
    lines.push_back(json{{"kind", "promotion"}, {"session", model.promoted_sessions[i]}}.dump());
  }
  append_lines(user_file(model.user_id), lines);
}

}  // namespace moviebot
