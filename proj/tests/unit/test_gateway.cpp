#include <doctest.h>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <httplib.h>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>
#include <thread>

#include "moviebot/gateway/config.hpp"
#include "moviebot/gateway/server.hpp"
#include "moviebot/nlu/rule_parser.hpp"
#include "moviebot/util/errors.hpp"
#include "test_support.hpp"

using namespace moviebot;
using namespace moviebot::gateway;
using nlohmann::json;

namespace {

ChatAssets bundled_assets() {
  ChatAssets a;
  a.catalog = testsupport::bundled_catalog();
  a.nlu = std::make_shared<const nlu::RuleBasedNlu>(
      testsupport::bundled_lexicons(),
      nlu::load_intent_patterns(testsupport::data_path("nlu/intent_patterns.tsv")));
  a.policy = std::make_shared<const policy::RulePolicy>();
  a.templates = std::make_shared<const NlgTemplateTable>(
      NlgTemplateTable::load(testsupport::data_path("config/nlg_templates.tsv")));
  return a;
}

struct Fixture {
  testsupport::TempDir dir{"gateway"};
  std::shared_ptr<UserStore> users = std::make_shared<UserStore>(dir.path / "users");
  std::shared_ptr<AuthStore> auth = std::make_shared<AuthStore>(dir.path / "auth.jsonl");
  ChatService chat{bundled_assets(), users, auth};
};

// Everything but the session id, so transcripts of different sessions compare.
json strip(const WireMessage& m) {
  auto j = to_json(m);
  j.erase("session");
  return j;
}

std::vector<json> run_script(ChatService& chat, const std::string& id,
                             const std::vector<std::string>& lines) {
  std::vector<json> out;
  for (const auto& l : lines) {
    for (const auto& m : chat.handle_user_message(id, l)) out.push_back(strip(m));
  }
  return out;
}

const std::vector<std::string> kScriptA = {"hi", "i want a comedy", "something with Tom Hanks",
                                           "i've already seen it", "who directed it", "sounds good"};
const std::vector<std::string> kScriptB = {"i like horror movies", "no thanks", "from the 1980s",
                                           "forget about horror", "show me more", "goodbye"};

bool contains_bytes(const std::filesystem::path& root, const std::string& needle) {
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("wire messages have exactly four keys") {
  const WireMessage m{MessageType::kAgentMessage, "abc", {{"text", "hi"}}, 3};
  const auto j = to_json(m);
  CHECK(j.size() == 4);
  for (const char* k : {"type", "session", "payload", "seq"}) CHECK(j.contains(k));
  CHECK(j["type"] == "agent_message");
  CHECK(wire_from_json(j) == m);
  auto extra = j;
  extra["x"] = 1;
  CHECK_THROWS_AS(wire_from_json(extra), ParseError);
  auto missing = j;
  missing.erase("seq");
  CHECK_THROWS_AS(wire_from_json(missing), ParseError);
  auto bad = j;
  bad["type"] = "shout";
  CHECK_THROWS_AS(wire_from_json(bad), ParseError);
  for (auto t : {MessageType::kUserMessage, MessageType::kAgentMessage, MessageType::kRecommendation,
                 MessageType::kUserModel, MessageType::kError, MessageType::kSystem}) {
    CHECK(parse_message_type(name(t)) == t);
  }
}

TEST_CASE("password hashing") {
  CHECK(random_hex(16).size() == 32);
  CHECK(random_hex(16) != random_hex(16));
  // RFC 7914 test vector for PBKDF2-HMAC-SHA256, one iteration.
  const std::string salt_hex = "73616c74";  // "salt"
  CHECK(pbkdf2_hex("passwd", salt_hex, 1).substr(0, 16) == "55ac046e56e3089f");
  testsupport::TempDir dir("auth");
  AuthStore store(dir.path / "auth.jsonl");
  store.register_user("ann", "correct horse");
  CHECK(store.exists("ann"));
  CHECK_NOTHROW(store.verify("ann", "correct horse"));
  CHECK_THROWS_AS(store.verify("ann", "wrong"), BadCredentials);
  CHECK_THROWS_AS(store.verify("bob", "x"), UnknownUserError);
  CHECK_THROWS_AS(store.register_user("ann", "again"), UserExistsError);
  CHECK_THROWS_AS(store.register_user("", "x"), ConfigError);
  CHECK_THROWS_AS(AuthStore(dir.path / "auth.jsonl", 1000), ConfigError);
  AuthStore reopened(dir.path / "auth.jsonl");
  CHECK_NOTHROW(reopened.verify("ann", "correct horse"));
  std::ifstream in(dir.path / "auth.jsonl");
  std::string header;
  std::getline(in, header);
  CHECK(json::parse(header)["kdf"] == "PBKDF2-HMAC-SHA256");
  CHECK(json::parse(header)["iterations"] == 100000);
  CHECK_FALSE(contains_bytes(dir.path, "correct horse"));
}

TEST_CASE("sessions start with a welcome") {
  Fixture f;
  const auto a = f.chat.create_session();
  const auto b = f.chat.create_session();
  CHECK(a.session != b.session);
  CHECK(a.session.size() == 32);
  REQUIRE(a.messages.size() == 1);
  CHECK(a.messages[0].type == MessageType::kAgentMessage);
  CHECK(a.messages[0].seq == 1);
  CHECK(a.messages[0].payload["act"]["intent"] == "WELCOME");
  CHECK(f.chat.session_count() == 2);
}

TEST_CASE("a comedy request gets an elicit or a recommendation") {
  Fixture f;
  const auto s = f.chat.create_session();
  const auto out = f.chat.handle_user_message(s.session, "i want a comedy");
  REQUIRE_FALSE(out.empty());
  CHECK(out[0].type == MessageType::kAgentMessage);
  CHECK(out[0].seq == 2);
  const auto intent = out[0].payload["act"]["intent"].get<std::string>();
  CHECK((intent == "ELICIT" || intent == "RECOMMEND"));
  CHECK_FALSE(out[0].payload["text"].get<std::string>().empty());
  const auto st = f.chat.state(s.session);
  REQUIRE(st.frame[index_of(Slot::kGenre)].size() == 1);
  CHECK(st.frame[index_of(Slot::kGenre)][0].value == "comedy");
}

TEST_CASE("errors, empty text and soft reset") {
  Fixture f;
  CHECK_THROWS_AS(f.chat.handle_user_message("nope", "hi"), UnknownSessionError);
  const auto s = f.chat.create_session();
  const auto empty = f.chat.handle_user_message(s.session, "");
  REQUIRE(empty.size() >= 1);
  CHECK(empty[0].type == MessageType::kAgentMessage);

  // Accepting before anything was recommended is a tracker error.
  const auto err = f.chat.handle_user_message(s.session, "sounds good");
  REQUIRE(err.size() == 2);
  CHECK(err[0].type == MessageType::kError);
  CHECK(err[0].payload["code"] == "state_update");
  CHECK(err[1].payload["event"] == "session_reset");
  const auto after = f.chat.handle_user_message(s.session, "i want a comedy");
  CHECK(after[0].type == MessageType::kAgentMessage);
  CHECK(after[0].seq == err[1].seq + 1);
}

TEST_CASE("seq is gapless and the session ends on goodbye") {
  Fixture f;
  const auto s = f.chat.create_session();
  std::uint64_t expect = 2;
  for (const auto& line : kScriptB) {
    for (const auto& m : f.chat.handle_user_message(s.session, line)) {
      CHECK(m.seq == expect++);
      CHECK(m.session == s.session);
    }
  }
  CHECK(f.chat.terminated(s.session));
  CHECK_THROWS_AS(f.chat.handle_user_message(s.session, "hello?"), TerminatedSessionError);
}

TEST_CASE("accepting a recommendation ends the session") {
  Fixture f;
  const auto s = f.chat.create_session();
  bool recommended = false;
  for (const auto& line : {"i want a comedy", "no preference", "no", "nothing else"}) {
    for (const auto& m : f.chat.handle_user_message(s.session, line)) {
      if (m.type == MessageType::kRecommendation) {
        recommended = true;
        CHECK(m.payload["item"].contains("title"));
        CHECK(m.payload["explanation"].is_string());
      }
    }
    if (recommended) break;
  }
  REQUIRE(recommended);
  const auto out = f.chat.handle_user_message(s.session, "sounds good");
  CHECK(out.back().type == MessageType::kSystem);
  CHECK(out.back().payload["event"] == "session_ended");
  CHECK(f.chat.state(s.session).accepted);
  CHECK(f.chat.terminated(s.session));
}

TEST_CASE("interleaved sessions match serial execution") {
  Fixture serial_f;
  const auto sa = serial_f.chat.create_session().session;
  const auto sb = serial_f.chat.create_session().session;
  const auto serial_a = run_script(serial_f.chat, sa, kScriptA);
  const auto serial_b = run_script(serial_f.chat, sb, kScriptB);

  SUBCASE("alternating on one thread") {
    Fixture f;
    const auto a = f.chat.create_session().session;
    const auto b = f.chat.create_session().session;
    std::vector<json> ta, tb;
    for (std::size_t i = 0; i < kScriptA.size(); ++i) {
      for (const auto& m : f.chat.handle_user_message(b, kScriptB[i])) tb.push_back(strip(m));
      for (const auto& m : f.chat.handle_user_message(a, kScriptA[i])) ta.push_back(strip(m));
    }
    CHECK(ta == serial_a);
    CHECK(tb == serial_b);
  }
  SUBCASE("two threads") {
    for (int rep = 0; rep < 10; ++rep) {
      Fixture f;
      const auto a = f.chat.create_session().session;
      const auto b = f.chat.create_session().session;
      std::vector<json> ta, tb;
      std::thread t1([&] { ta = run_script(f.chat, a, kScriptA); });
      std::thread t2([&] { tb = run_script(f.chat, b, kScriptB); });
      t1.join();
      t2.join();
      CHECK(ta == serial_a);
      CHECK(tb == serial_b);
    }
  }
}

TEST_CASE("register, login, chat and read the user model") {
  Fixture f;
  const std::string password = "pl41ntext-Secret!";
  f.chat.register_user("alice", password);
  CHECK_THROWS_AS(f.chat.register_user("alice", "other"), UserExistsError);

  const auto s = f.chat.create_session().session;
  CHECK_THROWS_AS(f.chat.get_user_model(s, "summary"), NotAuthenticated);
  CHECK_THROWS_AS(f.chat.login(s, "alice", "wrong"), BadCredentials);
  CHECK_FALSE(f.chat.user_of(s).has_value());
  CHECK_THROWS_AS(f.chat.login(s, "mallory", "x"), UnknownUserError);

  const auto ok = f.chat.login(s, "alice", password);
  CHECK(ok.payload["event"] == "logged_in");
  CHECK_NOTHROW(f.chat.login(s, "alice", password));
  CHECK(f.chat.user_of(s) == "alice");

  f.chat.handle_user_message(s, "i like comedy movies");
  const auto summary = f.chat.get_user_model(s, "summary");
  CHECK(summary.type == MessageType::kUserModel);
  const auto statements = summary.payload["statements"].get<std::vector<std::string>>();
  CHECK(std::find(statements.begin(), statements.end(), "You like comedy movies.") !=
        statements.end());

  const auto raw = f.chat.get_user_model(s, "raw");
  const auto stored = f.users->load("alice").current_view();
  REQUIRE(raw.payload["preferences"].size() == stored.size());
  for (const auto& p : raw.payload["preferences"]) {
    const auto slot = parse_slot(p["slot"].get<std::string>());
    REQUIRE(slot.has_value());
    const bool found = std::any_of(stored.begin(), stored.end(), [&](const PreferenceView& v) {
      return v.slot == *slot && v.value == p["value"] && v.polarity == p["polarity"];
    });
    CHECK(found);
  }
  CHECK(raw.payload["utterances"] == 1);
  CHECK_THROWS_AS(f.chat.get_user_model(s, "fancy"), ConfigError);

  // Clean end promotes; the next login starts from the long-term view.
  f.chat.end_session(s);
  const auto s2 = f.chat.create_session().session;
  const auto second = f.chat.login(s2, "alice", password);
  CHECK(second.payload["merged_preferences"] == 1);
  const auto st = f.chat.state(s2);
  REQUIRE(st.frame[index_of(Slot::kGenre)].size() == 1);
  CHECK(st.frame[index_of(Slot::kGenre)][0].value == "comedy");

  CHECK_FALSE(contains_bytes(f.dir.path, password));
}

TEST_CASE("anonymous sessions never write to the user store") {
  Fixture f;
  const auto s = f.chat.create_session().session;
  run_script(f.chat, s, kScriptB);
  f.chat.end_session(s);
  CHECK(f.users->users().empty());
  CHECK(std::filesystem::is_empty(f.dir.path / "users" / "users"));
  CHECK(f.chat.session_count() == 0);
  CHECK_NOTHROW(f.chat.end_session(s));
}

TEST_CASE("idle sessions expire") {
  std::int64_t t = 1000;
  testsupport::TempDir dir("expiry");
  ChatConfig cfg;
  cfg.idle_timeout = std::chrono::seconds(60);
  cfg.clock = [&t] { return t; };
  ChatService chat(bundled_assets(), nullptr, nullptr, cfg);
  const auto a = chat.create_session().session;
  t += 30;
  const auto b = chat.create_session().session;
  t += 40;
  CHECK(chat.expire_idle() == 1);
  CHECK_THROWS_AS(chat.state(a), UnknownSessionError);
  CHECK_NOTHROW(chat.state(b));
  CHECK_THROWS_AS(chat.register_user("x", "y"), ConfigError);
}

TEST_CASE("server config") {
  const auto c = parse_server_config(json{{"listen", "0.0.0.0:9000"}, {"catalog", "cat.jsonl"}},
                                     "/srv/mb");
  CHECK(c.listen == "0.0.0.0:9000");
  CHECK(c.catalog == "/srv/mb/cat.jsonl");
  CHECK(c.policy == "rule");
  CHECK_THROWS_AS(parse_server_config(json{{"colour", "red"}}), ConfigError);
  CHECK_THROWS_AS(parse_server_config(json{{"listen", 5}}), ConfigError);
  CHECK_THROWS_AS(parse_server_config(json{{"nlu_engine", "crf"}}), ConfigError);
  CHECK_THROWS_AS(parse_server_config(json{{"pbkdf2_iterations", 10}}), ConfigError);
  CHECK(split_address("127.0.0.1:80") == std::pair<std::string, std::uint16_t>{"127.0.0.1", 80});
  CHECK_THROWS_AS(split_address("localhost"), ConfigError);
  CHECK_THROWS_AS(split_address("h:99999"), ConfigError);

  testsupport::TempDir dir("srvcfg");
  {
    std::ofstream out(dir.file("server.json"));
    out << R"({"listen": "127.0.0.1:7000", "store_dir": "store"})";
  }
  ::setenv("MOVIEBOT_CONFIG", dir.file("server.json").c_str(), 1);
  ::setenv("MOVIEBOT_ADDR", "127.0.0.1:7001", 1);
  const auto r = resolve_server_config();
  ::unsetenv("MOVIEBOT_CONFIG");
  ::unsetenv("MOVIEBOT_ADDR");
  CHECK(r.listen == "127.0.0.1:7001");
  CHECK(r.store_dir == (dir.path / "store").string());
  CHECK(resolve_server_config().listen == "127.0.0.1:8080");

  ServerConfig bundled;
  bundled.catalog = testsupport::data_path("catalog/movies_100.jsonl");
  bundled.nlu_dir = testsupport::data_path("nlu");
  bundled.templates = testsupport::data_path("config/nlg_templates.tsv");
  const auto assets = load_assets(bundled);
  CHECK(assets.catalog->size() == 100);
  CHECK(assets.nlu->name() == "rule");
  CHECK(assets.policy->name() == "rule");
}

TEST_CASE("REST routes") {
  Fixture f;
  std::ostringstream log;
  auto* old = std::clog.rdbuf(log.rdbuf());
  Server server(f.chat, "127.0.0.1", 0);
  server.start();
  httplib::Client cli("127.0.0.1", server.port());

  auto res = cli.Post("/api/sessions", "", "application/json");
  REQUIRE(res);
  CHECK(res->status == 201);
  CHECK(res->get_header_value("Access-Control-Allow-Origin") == "*");
  const auto sid = json::parse(res->body)["session"].get<std::string>();
  CHECK(json::parse(res->body)["messages"][0]["seq"] == 1);

  res = cli.Post(("/api/sessions/" + sid + "/messages").c_str(), R"({"text":"i want a comedy"})",
                 "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  const auto msgs = json::parse(res->body);
  REQUIRE(msgs.is_array());
  CHECK(msgs[0]["type"] == "agent_message");
  CHECK(msgs[0]["seq"] == 2);

  res = cli.Post("/api/sessions/deadbeef/messages", R"({"text":"hi"})", "application/json");
  CHECK(res->status == 404);
  CHECK(json::parse(res->body)["error"] == "unknown_session");
  res = cli.Post(("/api/sessions/" + sid + "/messages").c_str(), "{not json", "application/json");
  CHECK(res->status == 400);
  res = cli.Post(("/api/sessions/" + sid + "/messages").c_str(), "{}", "application/json");
  CHECK(res->status == 400);
  res = cli.Get("/api/nowhere");
  CHECK(res->status == 404);

  const std::string password = "http-S3cret-pw";
  res = cli.Post("/api/auth/register", json{{"user", "bob"}, {"password", password}}.dump(),
                 "application/json");
  CHECK(res->status == 201);
  res = cli.Post("/api/auth/register", json{{"user", "bob"}, {"password", "x"}}.dump(),
                 "application/json");
  CHECK(res->status == 409);
  res = cli.Get(("/api/sessions/" + sid + "/user-model?form=summary").c_str());
  CHECK(res->status == 401);
  res = cli.Post("/api/auth/login",
                 json{{"session", sid}, {"user", "bob"}, {"password", "nope"}}.dump(),
                 "application/json");
  CHECK(res->status == 401);
  res = cli.Post("/api/auth/login",
                 json{{"session", sid}, {"user", "bob"}, {"password", password}}.dump(),
                 "application/json");
  CHECK(res->status == 200);
  cli.Post(("/api/sessions/" + sid + "/messages").c_str(), R"({"text":"i like comedy movies"})",
           "application/json");
  res = cli.Get(("/api/sessions/" + sid + "/user-model?form=summary").c_str());
  REQUIRE(res->status == 200);
  const auto model = json::parse(res->body);
  CHECK(model["type"] == "user_model");
  const auto st = model["payload"]["statements"].get<std::vector<std::string>>();
  CHECK(std::find(st.begin(), st.end(), "You like comedy movies.") != st.end());
  res = cli.Get(("/api/sessions/" + sid + "/state").c_str());
  CHECK(json::parse(res->body)["frame"]["genre"][0]["value"] == "comedy");

  httplib::Headers pre = {{"Origin", "http://example.org"},
                          {"Access-Control-Request-Method", "POST"}};
  res = cli.Options("/api/sessions", pre);
  CHECK(res->status == 204);

  res = cli.Delete(("/api/sessions/" + sid).c_str());
  CHECK(res->status == 204);
  res = cli.Delete(("/api/sessions/" + sid).c_str());
  CHECK(res->status == 404);

  server.stop();
  std::clog.rdbuf(old);
  CHECK(log.str().find("POST /api/auth/login 200") != std::string::npos);
  CHECK(log.str().find(password) == std::string::npos);
  CHECK_FALSE(contains_bytes(f.dir.path, password));
}

TEST_CASE("persistent channel") {
  namespace beast = boost::beast;
  namespace asio = boost::asio;
  Fixture f;
  Server server(f.chat, "127.0.0.1", 0);
  server.start();

  asio::io_context ioc;
  asio::ip::tcp::resolver resolver(ioc);
  beast::websocket::stream<asio::ip::tcp::socket> ws(ioc);
  asio::connect(ws.next_layer(), resolver.resolve("127.0.0.1", std::to_string(server.port())));
  ws.handshake("127.0.0.1", "/ws");
  ws.text(true);
  auto roundtrip = [&](const json& frame, std::size_t expect) {
    ws.write(asio::buffer(frame.dump()));
    std::vector<json> got;
    for (std::size_t i = 0; i < expect; ++i) {
      beast::flat_buffer buf;
      ws.read(buf);
      got.push_back(json::parse(beast::buffers_to_string(buf.data())));
    }
    return got;
  };

  auto hello = roundtrip({{"type", "system"}, {"session", ""}, {"payload", {{"action", "create_session"}}}, {"seq", 0}}, 1);
  CHECK(hello[0]["type"] == "agent_message");
  CHECK(hello[0]["seq"] == 1);
  const auto sid = hello[0]["session"].get<std::string>();

  auto reply = roundtrip({{"type", "user_message"}, {"session", sid}, {"payload", {{"text", "hi"}}}, {"seq", 1}}, 1);
  CHECK(reply[0]["type"] == "agent_message");
  CHECK(reply[0]["seq"] == 2);
  CHECK(reply[0].size() == 4);

  auto bad = roundtrip({{"type", "user_message"}, {"session", "zzz"}, {"payload", {{"text", "hi"}}}, {"seq", 1}}, 1);
  CHECK(bad[0]["type"] == "error");
  CHECK(bad[0]["payload"]["code"] == "unknown_session");
  ws.write(asio::buffer(std::string("not json")));
  beast::flat_buffer buf;
  ws.read(buf);
  CHECK(json::parse(beast::buffers_to_string(buf.data()))["type"] == "error");
  auto anon = roundtrip({{"type", "system"}, {"session", sid}, {"payload", {{"action", "user_model"}}}, {"seq", 2}}, 1);
  CHECK(anon[0]["payload"]["code"] == "not_authenticated");

  ws.close(beast::websocket::close_code::normal);
  server.stop();
}
