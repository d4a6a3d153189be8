#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

namespace moviebot::gateway {

enum class MessageType : std::uint8_t {
  kUserMessage,
  kAgentMessage,
  kRecommendation,
  kUserModel,
  kError,
  kSystem,
};
std::string_view name(MessageType t);
std::optional<MessageType> parse_message_type(std::string_view s);

// One protocol frame. Serializes to an object with exactly the keys type,
// session, payload and seq.
struct WireMessage {
  MessageType type = MessageType::kSystem;
  std::string session;
  nlohmann::json payload = nlohmann::json::object();
  std::uint64_t seq = 0;

  bool operator==(const WireMessage&) const = default;
};

nlohmann::json to_json(const WireMessage& m);
// ParseError on missing or extra keys or an unknown type.
WireMessage wire_from_json(const nlohmann::json& j);

WireMessage error_message(std::string session, std::string_view code, std::string_view text);

}  // namespace moviebot::gateway
