#include "moviebot/gateway/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "moviebot/nlu/crf_nlu.hpp"
#include "moviebot/nlu/rule_parser.hpp"
#include "moviebot/util/errors.hpp"

namespace moviebot::gateway {

namespace fs = std::filesystem;
using nlohmann::json;

void ServerConfig::validate() const {
  split_address(listen);
  if (nlu_engine != "rule" && nlu_engine != "crf") {
    throw ConfigError("nlu_engine must be rule or crf, got '" + nlu_engine + "'");
  }
  if (nlu_engine == "crf" && nlu_model.empty()) throw ConfigError("nlu_engine crf needs nlu_model");
  if (session_idle_minutes <= 0) throw ConfigError("session_idle_minutes must be positive");
  if (pbkdf2_iterations < 100000) throw ConfigError("pbkdf2_iterations must be at least 100000");
  if (max_turns <= 0) throw ConfigError("max_turns must be positive");
}

json ServerConfig::to_json() const {
  return {{"listen", listen},
          {"catalog", catalog},
          {"nlu_dir", nlu_dir},
          {"nlu_engine", nlu_engine},
          {"nlu_model", nlu_model},
          {"policy", policy},
          {"templates", templates},
          {"store_dir", store_dir},
          {"session_idle_minutes", session_idle_minutes},
          {"pbkdf2_iterations", pbkdf2_iterations},
          {"nlg_seed", nlg_seed},
          {"max_turns", max_turns}};
}

namespace {

std::string resolve(const std::string& base, const std::string& p) {
  if (p.empty() || base.empty() || fs::path(p).is_absolute()) return p;
  return (fs::path(base) / p).lexically_normal().string();
}

}  // namespace

ServerConfig parse_server_config(const json& j, const std::string& base_dir) {
  if (!j.is_object()) throw ConfigError("server config must be a JSON object");
  ServerConfig c;
  const json defaults = c.to_json();
  for (const auto& [key, value] : j.items()) {
    if (!defaults.contains(key)) throw ConfigError("unknown server config key '" + key + "'");
    if (value.type() != defaults[key].type() &&
        !(value.is_number_integer() && defaults[key].is_number_integer())) {
      throw ConfigError("server config key '" + key + "' has the wrong type");
    }
  }
  try {
    c.listen = j.value("listen", c.listen);
    c.catalog = resolve(base_dir, j.value("catalog", c.catalog));
    c.nlu_dir = resolve(base_dir, j.value("nlu_dir", c.nlu_dir));
    c.nlu_engine = j.value("nlu_engine", c.nlu_engine);
    c.nlu_model = resolve(base_dir, j.value("nlu_model", c.nlu_model));
    c.policy = j.value("policy", c.policy);
    if (c.policy != "rule") c.policy = resolve(base_dir, c.policy);
    c.templates = resolve(base_dir, j.value("templates", c.templates));
    c.store_dir = resolve(base_dir, j.value("store_dir", c.store_dir));
    c.session_idle_minutes = j.value("session_idle_minutes", c.session_idle_minutes);
    c.pbkdf2_iterations = j.value("pbkdf2_iterations", c.pbkdf2_iterations);
    c.nlg_seed = j.value("nlg_seed", c.nlg_seed);
    c.max_turns = j.value("max_turns", c.max_turns);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("server config: ") + e.what());
  }
  c.validate();
  return c;
}

ServerConfig load_server_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open server config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("server config '" + path + "': " + e.what(), 0);
  }
  return parse_server_config(j, fs::path(path).parent_path().string());
}

ServerConfig resolve_server_config(const std::string& path) {
  std::string file = path;
  if (file.empty()) {
    if (const char* env = std::getenv("MOVIEBOT_CONFIG"); env && *env) file = env;
  }
  ServerConfig c = file.empty() ? ServerConfig{} : load_server_config(file);
  if (const char* addr = std::getenv("MOVIEBOT_ADDR"); addr && *addr) c.listen = addr;
  c.validate();
  return c;
}

std::pair<std::string, std::uint16_t> split_address(const std::string& addr) {
  const auto colon = addr.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == addr.size()) {
    throw ConfigError("listen address must be host:port, got '" + addr + "'");
  }
  const std::string port = addr.substr(colon + 1);
  char* end = nullptr;
  const long p = std::strtol(port.c_str(), &end, 10);
  if (*end != '\0' || p < 0 || p > 65535) throw ConfigError("bad port in '" + addr + "'");
  return {addr.substr(0, colon), static_cast<std::uint16_t>(p)};
}

ChatAssets load_assets(const ServerConfig& cfg) {
  cfg.validate();
  ChatAssets a;
  a.catalog = std::make_shared<const Catalog>(Catalog::load(cfg.catalog));
  auto lex = std::make_shared<const nlu::Lexicons>(nlu::Lexicons::load(cfg.nlu_dir, *a.catalog));
  if (cfg.nlu_engine == "rule") {
    a.nlu = std::make_shared<const nlu::RuleBasedNlu>(
        lex, nlu::load_intent_patterns(cfg.nlu_dir + "/intent_patterns.tsv"));
  } else {
    auto model = std::make_shared<const nlu::CrfModel>(nlu::CrfModel::load(cfg.nlu_model));
    auto enc = std::make_shared<const nlu::FeatureEncoder>(lex, a.catalog, model->hash_dim());
    a.nlu = std::make_shared<const nlu::CrfNlu>(model, enc);
  }
  if (cfg.policy == "rule") {
    a.policy = std::make_shared<const policy::RulePolicy>(cfg.max_turns);
  } else {
    a.policy = std::make_shared<const policy::LearnedPolicy>(policy::load_policy(cfg.policy));
  }
  a.templates = std::make_shared<const NlgTemplateTable>(NlgTemplateTable::load(cfg.templates));
  a.max_turns = cfg.max_turns;
  return a;
}

}  // namespace moviebot::gateway
