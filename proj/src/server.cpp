#include "jcave/server.hpp"

#include <sys/socket.h>

#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <vector>

#include "jcave/protocol.hpp"

namespace jcave {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using nlohmann::json;

namespace {

std::string_view mime_type(const std::filesystem::path& p) {
  auto ext = p.extension().string();
  if (ext == ".html" || ext == ".htm") return "text/html";
  if (ext == ".js" || ext == ".mjs") return "application/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".png") return "image/png";
  if (ext == ".svg") return "image/svg+xml";
  return "application/octet-stream";
}

http::response<http::string_body> text_response(const http::request<http::string_body>& req, http::status status,
                                                std::string_view type, std::string body) {
  http::response<http::string_body> res{status, req.version()};
  res.set(http::field::server, "jcave");
  res.set(http::field::content_type, beast::string_view(type.data(), type.size()));
  res.keep_alive(req.keep_alive());
  res.body() = std::move(body);
  res.prepare_payload();
  return res;
}

}  // namespace

std::pair<std::string, std::uint16_t> parse_bind_address(const std::string& text) {
  auto colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == text.size()) {
    throw std::invalid_argument("bind address must be host:port, got '" + text + "'");
  }
  std::size_t used = 0;
  int port = -1;
  try {
    port = std::stoi(text.substr(colon + 1), &used);
  } catch (const std::exception&) {
  }
  if (port < 0 || port > 65535 || used != text.size() - colon - 1) {
    throw std::invalid_argument("invalid port in '" + text + "'");
  }
  return {text.substr(0, colon), static_cast<std::uint16_t>(port)};
}

struct Server::Impl {
  ServerOptions options;
  asio::io_context ioc{1};
  tcp::acceptor acceptor{ioc};
  std::mutex mutex;
  std::set<int> live_sockets;
  std::vector<std::thread> workers;

  void accept_next() {
    acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) {
        return;
      }
      std::lock_guard lock(mutex);
      live_sockets.insert(socket.native_handle());
      workers.emplace_back([this, s = std::move(socket)]() mutable { serve(std::move(s)); });
      accept_next();
    });
  }

  void serve(tcp::socket socket) {
    const int fd = socket.native_handle();
    try {
      serve_http(socket);
    } catch (const std::exception&) {
      // Peer went away or sent garbage; nothing to report.
    }
    std::lock_guard lock(mutex);
    live_sockets.erase(fd);
  }

  void serve_http(tcp::socket& socket) {
    beast::flat_buffer buffer;
    for (;;) {
      http::request<http::string_body> req;
      beast::error_code ec;
      http::read(socket, buffer, req, ec);
      if (ec) {
        return;
      }
      if (websocket::is_upgrade(req)) {
        if (req.target() != "/session") {
          http::write(socket, text_response(req, http::status::not_found, "text/plain", "no such endpoint\n"));
          return;
        }
        serve_session(std::move(socket), req);
        return;
      }
      auto res = handle_request(req);
      http::write(socket, res, ec);
      if (ec || !res.keep_alive()) {
        return;
      }
    }
  }

  http::response<http::string_body> handle_request(const http::request<http::string_body>& req) {
    if (req.method() != http::verb::get && req.method() != http::verb::head) {
      return text_response(req, http::status::method_not_allowed, "text/plain", "GET only\n");
    }
    std::string target(req.target());
    if (auto q = target.find('?'); q != std::string::npos) {
      target.resize(q);
    }
    if (target == "/health") {
      json body = {{"service", "jcave"},
                   {"version", std::string(kServiceVersion)},
                   {"protocol_version", kProtocolVersion}};
      return text_response(req, http::status::ok, "application/json", body.dump());
    }
    if (options.static_dir.empty() || target.find("..") != std::string::npos || target.empty() ||
        target.front() != '/') {
      return text_response(req, http::status::not_found, "text/plain", "not found\n");
    }
    auto rel = target == "/" ? std::string("index.html") : target.substr(1);
    auto path = options.static_dir / rel;
    std::ifstream in(path, std::ios::binary);
    if (!in || std::filesystem::is_directory(path)) {
      return text_response(req, http::status::not_found, "text/plain", "not found\n");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return text_response(req, http::status::ok, mime_type(path), buf.str());
  }

  void serve_session(tcp::socket socket, const http::request<http::string_body>& req) {
    websocket::stream<tcp::socket> ws(std::move(socket));
    ws.accept(req);
    ws.text(true);
    ServiceConnection conn(options.store);
    beast::flat_buffer buffer;
    for (;;) {
      buffer.clear();
      beast::error_code ec;
      ws.read(buffer, ec);
      if (ec) {
        return;
      }
      auto reply = conn.handle_text(beast::buffers_to_string(buffer.data()));
      for (const auto& m : reply.messages) {
        ws.write(asio::buffer(m.dump()));
      }
      if (reply.close) {
        ws.close(websocket::close_code::normal, ec);
        return;
      }
    }
  }
};

Server::Server(ServerOptions options) : impl_(std::make_unique<Impl>()) {
  impl_->options = std::move(options);
  beast::error_code ec;
  auto address = asio::ip::make_address(impl_->options.address, ec);
  if (ec) {
    throw BindError("invalid bind address '" + impl_->options.address + "': " + ec.message());
  }
  tcp::endpoint endpoint{address, impl_->options.port};
  auto& acc = impl_->acceptor;
  const auto where = impl_->options.address + ":" + std::to_string(impl_->options.port);
  acc.open(endpoint.protocol(), ec);
  if (!ec) acc.set_option(asio::socket_base::reuse_address(true), ec);
  if (!ec) acc.bind(endpoint, ec);
  if (!ec) acc.listen(asio::socket_base::max_listen_connections, ec);
  if (ec) {
    throw BindError("cannot bind " + where + ": " + ec.message());
  }
}

Server::~Server() {
  stop();
  std::vector<std::thread> workers;
  {
    std::lock_guard lock(impl_->mutex);
    for (int fd : impl_->live_sockets) {
      ::shutdown(fd, SHUT_RDWR);
    }
    workers.swap(impl_->workers);
  }
  for (auto& t : workers) {
    if (t.joinable()) t.join();
  }
}

std::uint16_t Server::port() const noexcept { return impl_->acceptor.local_endpoint().port(); }

void Server::run() {
  impl_->accept_next();
  impl_->ioc.run();
}

void Server::stop() { impl_->ioc.stop(); }

}  // namespace jcave
