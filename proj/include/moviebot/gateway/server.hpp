#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "moviebot/gateway/chat_service.hpp"

namespace moviebot::gateway {

struct HttpReply {
  int status = 200;
  nlohmann::json body;
};

// REST routing, independent of the transport.
//   POST /api/sessions                       -> 201 {session, messages}
//   POST /api/sessions/{id}/messages {text}  -> 200 [WireMessage...]
//   POST /api/auth/register {user,password}  -> 201
//   POST /api/auth/login {session,user,password} -> 200 WireMessage
//   GET  /api/sessions/{id}/user-model?form=raw|summary -> 200 WireMessage
//   GET  /api/sessions/{id}/state            -> 200 state dump
//   DELETE /api/sessions/{id}                -> 204
// Errors come back as {"error": code, "message": text}.
HttpReply route_request(ChatService& chat, std::string_view method, std::string_view target,
                        std::string_view body);

// One inbound frame on the persistent channel, answered with zero or more
// frames. Besides user_message the channel accepts system frames with
// payload.action one of create_session, login, user_model, end_session.
std::vector<nlohmann::json> handle_channel_frame(ChatService& chat, std::string_view text);

// HTTP/1.1 and WebSocket (/ws) server, one thread per connection.
class Server {
 public:
  // port 0 picks a free port.
  Server(ChatService& chat, const std::string& host, std::uint16_t port);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  std::uint16_t port() const;
  void start();  // accepts on a background thread
  void run();    // accepts on the calling thread until stop()
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace moviebot::gateway
