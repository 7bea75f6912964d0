#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "gecal/oracle.hpp"

namespace gecal {

struct HttpReply {
  int status = 200;
  std::string body;
};

/// Protocol handlers, independent of the transport.
HttpReply handle_health(const GecOracle& oracle);
HttpReply handle_correct(GecOracle& oracle, std::string_view request_body);

/// Serves an oracle over HTTP: GET /health, POST /correct.
class GecServer {
 public:
  explicit GecServer(std::shared_ptr<GecOracle> oracle);
  ~GecServer();

  GecServer(const GecServer&) = delete;
  GecServer& operator=(const GecServer&) = delete;

  /// Binds; port 0 picks a free port. Returns the bound port or -1.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  bool listen();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace gecal
