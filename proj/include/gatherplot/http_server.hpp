#pragma once

// cpp-httplib binding for LayoutService.

#include <gatherplot/error.hpp>
#include <gatherplot/service.hpp>

#include "httplib.h"

#include <memory>
#include <string>
#include <utility>

namespace gatherplot {

struct BindAddress {
  std::string host = "127.0.0.1";
  int port = 8080;
};

// "host:port", ":port" or "port".
inline BindAddress parse_bind(std::string_view text) {
  BindAddress addr;
  auto colon = text.rfind(':');
  std::string_view port_text = text;
  if (colon != std::string_view::npos) {
    if (colon > 0) addr.host = std::string(text.substr(0, colon));
    port_text = text.substr(colon + 1);
  }
  auto port = parse_number(port_text);
  if (!port || *port < 0 || *port > 65535 || *port != static_cast<int>(*port)) {
    throw error(errc::parameter, "invalid bind address '" + std::string(text) + "'");
  }
  addr.port = static_cast<int>(*port);
  return addr;
}

class HttpServer {
 public:
  explicit HttpServer(std::shared_ptr<LayoutService> service) : service_(std::move(service)) {
    auto handler = [this](const httplib::Request& in, httplib::Response& out) { dispatch(in, out); };
    server_.Get(".*", handler);
    server_.Post(".*", handler);
    server_.Delete(".*", handler);
    server_.Options(".*", [](const httplib::Request&, httplib::Response& out) { out.status = 204; });
    server_.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                 {"Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS"},
                                 {"Access-Control-Allow-Headers", "Content-Type"}});
    server_.set_payload_max_length(256u << 20);
    // httplib's default adds SO_REUSEPORT, which lets a second server share
    // an occupied port silently.
    server_.set_socket_options([](socket_t sock) {
      int yes = 1;
      ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof(yes));
    });
  }

  // Port 0 picks a free port. Throws when the address cannot be bound.
  int bind(const BindAddress& addr) {
    if (addr.port == 0) {
      port_ = server_.bind_to_any_port(addr.host);
      if (port_ < 0) throw error(errc::parameter, "cannot bind " + addr.host);
    } else {
      if (!server_.bind_to_port(addr.host, addr.port)) {
        throw error(errc::parameter, "cannot bind " + addr.host + ":" + std::to_string(addr.port));
      }
      port_ = addr.port;
    }
    return port_;
  }

  // Blocks until stop().
  bool listen() { return server_.listen_after_bind(); }
  void stop() { server_.stop(); }
  void wait_until_ready() const { server_.wait_until_ready(); }
  int port() const noexcept { return port_; }

 private:
  void dispatch(const httplib::Request& in, httplib::Response& out) {
    Request req;
    req.method = in.method;
    req.path = in.path;
    for (const auto& [k, v] : in.params) req.query.emplace(k, v);
    req.body = in.body;
    auto res = service_->handle(req);
    out.status = res.status;
    out.set_content(res.body, res.content_type);
  }

  std::shared_ptr<LayoutService> service_;
  httplib::Server server_;
  int port_ = -1;
};

}  // namespace gatherplot
