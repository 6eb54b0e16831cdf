#pragma once

#include <cstdint>
#include <memory>

#include "groupfeed/server/config.hpp"
#include "groupfeed/server/log_store.hpp"

namespace groupfeed::server {

class Hub;

/// Network front end for a Hub: newline-delimited JSON over TCP plus the same
/// messages as WebSocket text frames. Everything runs on the thread that calls
/// run(), so the hub never sees concurrent calls.
class Server {
 public:
  Server(ServerConfig cfg, std::shared_ptr<LogStore> store);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds the listeners. Port 0 picks a free port; see tcp_port()/ws_port().
  void listen();
  /// Serves until stop() is called or SIGINT/SIGTERM arrives (if enabled).
  void run(bool handle_signals = true);
  /// Ends every room, flushes logs and makes run() return. Safe from any thread.
  void stop();

  std::uint16_t tcp_port() const;
  std::uint16_t ws_port() const;  // 0 when WebSocket is disabled or not yet bound
  const Hub& hub() const;

  /// Longest accepted input line or WebSocket message.
  std::size_t max_message_bytes() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace groupfeed::server
