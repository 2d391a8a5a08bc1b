#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>

#include "jcave/profile_store.hpp"

namespace jcave {

struct ServerOptions {
  std::string address = "127.0.0.1";
  std::uint16_t port = 8765;  // 0 picks a free port
  std::filesystem::path static_dir;  // UI bundle; empty disables static serving
  std::shared_ptr<ProfileStore> store;
};

class BindError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parses "host:port" (port may be 0). Throws std::invalid_argument.
std::pair<std::string, std::uint16_t> parse_bind_address(const std::string& text);

// HTTP + WebSocket front end for ServiceConnection.
//
//   GET /health      service and protocol version as JSON
//   GET /session     WebSocket upgrade; one session per connection
//   GET /<path>      files from static_dir
//
// The listening socket is bound in the constructor, which throws BindError when the
// address is unavailable.
class Server {
 public:
  explicit Server(ServerOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  std::uint16_t port() const noexcept;

  // Blocks, accepting connections until stop() is called.
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace jcave
