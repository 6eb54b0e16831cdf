#include <spdlog/spdlog.h>

#include <iostream>

#include "CLI11.hpp"
#include "groupfeed/server/log_store.hpp"
#include "groupfeed/server/server.hpp"

using namespace groupfeed;

int main(int argc, char** argv) {
  CLI::App app{"groupfeed-server: hosts feedback rooms over TCP and WebSocket"};
  std::string config_path;
  std::optional<std::uint16_t> port, ws_port;
  std::optional<std::uint32_t> max_members, tick_ms;
  std::optional<double> duration_s;
  std::optional<std::string> bind, log_dir, mode;
  std::string log_level = "info";

  app.add_option("-c,--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("-p,--port", port, "TCP port (newline-delimited JSON)");
  bool no_ws = false;
  app.add_option("--ws-port", ws_port, "WebSocket port");
  app.add_flag("--no-websocket", no_ws, "serve TCP only");
  app.add_option("--bind", bind, "address to listen on");
  app.add_option("--members", max_members, "participants per room; the clock starts when all have joined");
  app.add_option("--tick-ms", tick_ms, "tick duration in milliseconds");
  app.add_option("--duration", duration_s, "session length in seconds");
  app.add_option("--log-dir", log_dir, "where session logs are written");
  app.add_option("--mode", mode, "mode for rooms created on demand")->check(CLI::IsMember({"feedback", "nofeedback"}));
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error"}));
  CLI11_PARSE(app, argc, argv);

  spdlog::set_level(spdlog::level::from_str(log_level));
  try {
    server::ServerConfig cfg;
    if (!config_path.empty()) cfg = server::load_config_file(config_path, cfg);
    if (port) cfg.port = *port;
    if (ws_port) cfg.ws_port = *ws_port;
    if (no_ws) cfg.websocket = false;
    if (bind) cfg.bind_address = *bind;
    if (max_members) cfg.max_members = *max_members;
    if (tick_ms) cfg.engine.tick_duration_ms = *tick_ms;
    if (duration_s) cfg.session_duration_s = *duration_s;
    if (log_dir) cfg.log_dir = *log_dir;
    if (mode) cfg.default_mode = *session::parse_room_mode(*mode);
    cfg.validate();

    server::Server srv(cfg, std::make_shared<server::FileLogStore>(cfg.log_dir));
    srv.run();
  } catch (const std::exception& e) {
    spdlog::critical("{}", e.what());
    return 1;
  }
  return 0;
}
