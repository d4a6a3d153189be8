#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "moviebot/gateway/chat_service.hpp"

namespace moviebot::gateway {

// Server settings from one JSON file. Relative paths resolve against the
// file's directory. Environment overrides: MOVIEBOT_CONFIG names the file
// when none is given, MOVIEBOT_ADDR replaces "listen".
struct ServerConfig {
  std::string listen = "127.0.0.1:8080";
  std::string catalog = "data/catalog/movies_100.jsonl";
  std::string nlu_dir = "data/nlu";
  std::string nlu_engine = "rule";  // rule | crf
  std::string nlu_model;            // CRF model file, crf engine only
  std::string policy = "rule";      // "rule" or a policy file
  std::string templates = "data/config/nlg_templates.tsv";
  std::string store_dir = "var/store";
  int session_idle_minutes = 30;
  std::uint32_t pbkdf2_iterations = 100000;
  std::uint64_t nlg_seed = 0;
  int max_turns = 30;

  // ConfigError naming the offending key.
  void validate() const;
  nlohmann::json to_json() const;
};

// Unknown keys are rejected. Throws ConfigError or ParseError.
ServerConfig parse_server_config(const nlohmann::json& j, const std::string& base_dir = "");
ServerConfig load_server_config(const std::string& path);
// path, else $MOVIEBOT_CONFIG, else defaults; then $MOVIEBOT_ADDR.
ServerConfig resolve_server_config(const std::string& path = "");

// host and port of "host:port". ConfigError when malformed.
std::pair<std::string, std::uint16_t> split_address(const std::string& addr);

ChatAssets load_assets(const ServerConfig& cfg);

}  // namespace moviebot::gateway
