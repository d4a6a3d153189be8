#include "moviebot/gateway/wire.hpp"

#include <array>

#include "moviebot/util/errors.hpp"

namespace moviebot::gateway {

namespace {
constexpr std::array<std::string_view, 6> kNames = {
    "user_message", "agent_message", "recommendation", "user_model", "error", "system"};
}

std::string_view name(MessageType t) { return kNames[static_cast<std::size_t>(t)]; }

std::optional<MessageType> parse_message_type(std::string_view s) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == s) return static_cast<MessageType>(i);
  }
  return std::nullopt;
}

nlohmann::json to_json(const WireMessage& m) {
  return {{"type", name(m.type)}, {"session", m.session}, {"payload", m.payload}, {"seq", m.seq}};
}

WireMessage wire_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("message must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (key != "type" && key != "session" && key != "payload" && key != "seq") {
      throw ParseError("unexpected message key '" + key + "'");
    }
  }
  try {
    WireMessage m;
    const auto type = j.at("type").get<std::string>();
    auto t = parse_message_type(type);
    if (!t) throw ParseError("unknown message type '" + type + "'");
    m.type = *t;
    m.session = j.at("session").get<std::string>();
    m.payload = j.at("payload");
    m.seq = j.at("seq").get<std::uint64_t>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed message: ") + e.what());
  }
}

WireMessage error_message(std::string session, std::string_view code, std::string_view text) {
  WireMessage m;
  m.type = MessageType::kError;
  m.session = std::move(session);
  m.payload = {{"code", code}, {"message", text}};
  return m;
}

}  // namespace moviebot::gateway
