#include "moviebot/gateway/server.hpp"

#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <fmt/core.h>

#include <iostream>
#include <map>

#include "moviebot/util/errors.hpp"

namespace moviebot::gateway {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using nlohmann::json;

namespace {

json error_body(std::string_view code, std::string_view text) {
  return {{"error", code}, {"message", text}};
}

// Maps a thrown error to an HTTP status and a stable code.
std::pair<int, std::string> classify(const std::exception& e) {
  if (dynamic_cast<const UnknownSessionError*>(&e)) return {404, "unknown_session"};
  if (dynamic_cast<const TerminatedSessionError*>(&e)) return {409, "session_terminated"};
  if (dynamic_cast<const UserExistsError*>(&e)) return {409, "user_exists"};
  // Unknown users and wrong passwords look the same from outside.
  if (dynamic_cast<const BadCredentials*>(&e) || dynamic_cast<const UnknownUserError*>(&e)) {
    return {401, "bad_credentials"};
  }
  if (dynamic_cast<const NotAuthenticated*>(&e)) return {401, "not_authenticated"};
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ParseError*>(&e) ||
      dynamic_cast<const json::exception*>(&e)) {
    return {400, "bad_request"};
  }
  return {500, "internal"};
}

std::string public_message(int status, const std::exception& e) {
  if (status == 401 && std::string_view(e.what()).find("log in") == std::string_view::npos) {
    return "invalid user name or password";
  }
  return status == 500 ? "internal error" : e.what();
}

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> parts;
  std::size_t i = 0;
  while (i < path.size()) {
    while (i < path.size() && path[i] == '/') ++i;
    const auto j = path.find('/', i);
    const auto end = j == std::string_view::npos ? path.size() : j;
    if (end > i) parts.emplace_back(path.substr(i, end - i));
    i = end;
  }
  return parts;
}

std::map<std::string, std::string> parse_query(std::string_view q) {
  std::map<std::string, std::string> out;
  std::size_t i = 0;
  while (i < q.size()) {
    auto amp = q.find('&', i);
    if (amp == std::string_view::npos) amp = q.size();
    const auto kv = q.substr(i, amp - i);
    const auto eq = kv.find('=');
    if (eq == std::string_view::npos) {
      out[std::string(kv)] = "";
    } else {
      out[std::string(kv.substr(0, eq))] = std::string(kv.substr(eq + 1));
    }
    i = amp + 1;
  }
  return out;
}

json parse_body(std::string_view body) {
  if (body.empty()) return json::object();
  auto j = json::parse(body);
  if (!j.is_object()) throw ConfigError("request body must be a JSON object");
  return j;
}

std::string required(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) {
    throw ConfigError(std::string("missing string field '") + key + "'");
  }
  return j[key].get<std::string>();
}

json messages_json(const std::vector<WireMessage>& ms) {
  json arr = json::array();
  for (const auto& m : ms) arr.push_back(to_json(m));
  return arr;
}

HttpReply dispatch(ChatService& chat, std::string_view method, std::string_view target,
                   std::string_view body) {
  const auto qpos = target.find('?');
  const auto path = split_path(target.substr(0, qpos));
  const auto query =
      qpos == std::string_view::npos ? std::map<std::string, std::string>{} : parse_query(target.substr(qpos + 1));
  if (path.size() < 2 || path[0] != "api") return {404, error_body("not_found", "no such route")};

  if (path[1] == "sessions") {
    if (path.size() == 2 && method == "POST") {
      auto created = chat.create_session();
      return {201, {{"session", created.session}, {"messages", messages_json(created.messages)}}};
    }
    if (path.size() == 3 && method == "DELETE") {
      chat.state(path[2]);  // 404 for unknown ids
      chat.end_session(path[2]);
      return {204, nullptr};
    }
    if (path.size() == 4 && path[3] == "messages" && method == "POST") {
      const auto j = parse_body(body);
      return {200, messages_json(chat.handle_user_message(path[2], required(j, "text")))};
    }
    if (path.size() == 4 && path[3] == "user-model" && method == "GET") {
      const auto it = query.find("form");
      return {200, to_json(chat.get_user_model(path[2], it == query.end() ? "summary" : it->second))};
    }
    if (path.size() == 4 && path[3] == "state" && method == "GET") {
      return {200, state_to_json(chat.state(path[2]))};
    }
  } else if (path[1] == "auth" && path.size() == 3 && method == "POST") {
    const auto j = parse_body(body);
    if (path[2] == "register") {
      chat.register_user(required(j, "user"), required(j, "password"));
      return {201, {{"user", j["user"]}}};
    }
    if (path[2] == "login") {
      return {200, to_json(chat.login(required(j, "session"), required(j, "user"),
                                      required(j, "password")))};
    }
  }
  return {404, error_body("not_found", "no such route")};
}

}  // namespace

HttpReply route_request(ChatService& chat, std::string_view method, std::string_view target,
                        std::string_view body) {
  try {
    return dispatch(chat, method, target, body);
  } catch (const std::exception& e) {
    const auto [status, code] = classify(e);
    return {status, error_body(code, public_message(status, e))};
  }
}

std::vector<json> handle_channel_frame(ChatService& chat, std::string_view text) {
  std::string session;
  try {
    const auto msg = wire_from_json(json::parse(text));
    session = msg.session;
    std::vector<WireMessage> out;
    if (msg.type == MessageType::kUserMessage) {
      if (!msg.payload.is_object()) throw ConfigError("payload must be an object");
      out = chat.handle_user_message(session, required(msg.payload, "text"));
    } else if (msg.type == MessageType::kSystem) {
      const auto action = required(msg.payload, "action");
      if (action == "create_session") {
        out = chat.create_session().messages;
      } else if (action == "login") {
        out.push_back(chat.login(session, required(msg.payload, "user"),
                                 required(msg.payload, "password")));
      } else if (action == "user_model") {
        out.push_back(chat.get_user_model(session, msg.payload.value("form", "summary")));
      } else if (action == "end_session") {
        chat.state(session);
        chat.end_session(session);
        out.push_back(WireMessage{MessageType::kSystem, session, {{"event", "session_ended"}}, 0});
      } else {
        throw ConfigError("unknown system action '" + action + "'");
      }
    } else {
      throw ConfigError("clients may only send user_message or system frames");
    }
    std::vector<json> frames;
    for (const auto& m : out) frames.push_back(to_json(m));
    return frames;
  } catch (const std::exception& e) {
    const auto [status, code] = classify(e);
    return {to_json(error_message(session, code, public_message(status, e)))};
  }
}

struct Server::Impl {
  struct Worker {
    std::thread thread;
    std::shared_ptr<std::atomic<bool>> done;
  };

  ChatService& chat;
  asio::io_context ioc;
  tcp::acceptor acceptor;
  std::atomic<bool> stopping{false};
  std::thread accept_thread;
  std::mutex mu;
  std::vector<Worker> workers;
  std::set<std::shared_ptr<tcp::socket>> live;

  Impl(ChatService& c, const std::string& host, std::uint16_t port)
      : chat(c), acceptor(ioc, tcp::endpoint(asio::ip::make_address(host), port)) {}

  void reap() {
    std::vector<Worker> keep;
    for (auto& w : workers) {
      if (*w.done) {
        w.thread.join();
      } else {
        keep.push_back(std::move(w));
      }
    }
    workers.swap(keep);
  }

  void accept_loop() {
    while (!stopping) {
      beast::error_code ec;
      auto socket = std::make_shared<tcp::socket>(ioc);
      acceptor.accept(*socket, ec);
      if (ec) {
        if (stopping) break;
        continue;
      }
      std::lock_guard lock(mu);
      if (stopping) break;
      reap();
      live.insert(socket);
      auto done = std::make_shared<std::atomic<bool>>(false);
      workers.push_back({std::thread([this, socket, done] {
                           serve(*socket);
                           std::lock_guard l(mu);
                           live.erase(socket);
                           *done = true;
                         }),
                         done});
    }
  }

  template <class Body>
  void add_cors(http::response<Body>& res) {
    res.set(http::field::access_control_allow_origin, "*");
    res.set(http::field::access_control_allow_headers, "Content-Type");
    res.set(http::field::access_control_allow_methods, "GET, POST, DELETE, OPTIONS");
  }

  void serve(tcp::socket& socket) {
    beast::error_code ec;
    beast::flat_buffer buffer;
    for (;;) {
      http::request<http::string_body> req;
      http::read(socket, buffer, req, ec);
      if (ec) break;
      if (websocket::is_upgrade(req)) {
        if (req.target() == "/ws") serve_channel(socket, std::move(req));
        break;
      }
      http::response<http::string_body> res{http::status::ok, req.version()};
      res.set(http::field::server, "moviebot");
      add_cors(res);
      if (req.method() == http::verb::options) {
        res.result(http::status::no_content);
      } else {
        const auto reply = route_request(chat, std::string(req.method_string()),
                                         std::string(req.target()), req.body());
        res.result(static_cast<unsigned>(reply.status));
        if (reply.status != 204) {
          res.set(http::field::content_type, "application/json");
          res.body() = reply.body.dump();
        }
        // Method and path only: bodies can carry passwords.
        std::clog << fmt::format("{} {} {}\n", std::string(req.method_string()),
                                 std::string(req.target().substr(0, req.target().find('?'))),
                                 reply.status);
      }
      res.keep_alive(req.keep_alive());
      res.prepare_payload();
      http::write(socket, res, ec);
      if (ec || !res.keep_alive()) break;
    }
    socket.shutdown(tcp::socket::shutdown_send, ec);
  }

  void serve_channel(tcp::socket& socket, http::request<http::string_body> req) {
    websocket::stream<tcp::socket&> ws(socket);
    beast::error_code ec;
    ws.accept(req, ec);
    if (ec) return;
    ws.text(true);
    for (;;) {
      beast::flat_buffer buf;
      ws.read(buf, ec);
      if (ec) return;
      for (const auto& frame : handle_channel_frame(chat, beast::buffers_to_string(buf.data()))) {
        ws.write(asio::buffer(frame.dump()), ec);
        if (ec) return;
      }
    }
  }
};

Server::Server(ChatService& chat, const std::string& host, std::uint16_t port)
    : impl_(std::make_unique<Impl>(chat, host, port)) {}

Server::~Server() { stop(); }

std::uint16_t Server::port() const { return impl_->acceptor.local_endpoint().port(); }

void Server::start() {
  impl_->accept_thread = std::thread([this] { impl_->accept_loop(); });
}

void Server::run() { impl_->accept_loop(); }

void Server::stop() {
  if (impl_->stopping.exchange(true)) return;
  beast::error_code ec;
  {
    // A blocking accept does not return on close; wake it with a connection.
    tcp::socket poke(impl_->ioc);
    auto ep = impl_->acceptor.local_endpoint(ec);
    if (!ec) {
      if (ep.address().is_unspecified()) ep.address(asio::ip::make_address("127.0.0.1"));
      poke.connect(ep, ec);
    }
  }
  if (impl_->accept_thread.joinable()) impl_->accept_thread.join();
  impl_->acceptor.close(ec);
  std::vector<Impl::Worker> workers;
  {
    std::lock_guard lock(impl_->mu);
    for (const auto& s : impl_->live) s->shutdown(tcp::socket::shutdown_both, ec);
    workers.swap(impl_->workers);
  }
  for (auto& w : workers) w.thread.join();
}

}  // namespace moviebot::gateway
