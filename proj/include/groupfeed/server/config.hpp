#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "groupfeed/metrics/room_state.hpp"
#include "groupfeed/session/messages.hpp"
#include "json.hpp"

namespace groupfeed::server {

struct ServerConfig {
  metrics::EngineConfig engine;
  std::uint32_t max_members = 4;  // also the quorum that starts the clock
  double session_duration_s = 900.0;
  double emit_interval_s = 1.0;
  std::uint32_t deadline_ticks = 2;    // straggler tolerance behind the room clock
  std::uint32_t max_lead_ticks = 100;  // how far ahead of the room a frame may run
  std::size_t max_signal_bytes = 256 * 1024;
  session::RoomMode default_mode = session::RoomMode::Feedback;
  /// When non-empty only these rooms exist; joins elsewhere get UnknownRoom.
  std::map<std::string, session::RoomMode> fixed_rooms;

  std::filesystem::path log_dir = "logs";
  std::string bind_address = "0.0.0.0";
  std::uint16_t port = 7700;     // newline-delimited TCP
  std::uint16_t ws_port = 7701;  // WebSocket
  bool websocket = true;

  /// Throws metrics::ConfigError on out-of-range values.
  void validate() const;

  metrics::Tick session_ticks() const;
  std::uint32_t emit_every_ticks() const;
};

/// Overlays keys present in `j` onto `cfg`. Keys: port, ws_port, websocket, bind,
/// max_members, tick_duration_ms, session_duration_s, emit_interval_s,
/// deadline_ticks, max_lead_ticks, log_dir, default_mode, rooms ({id: mode}),
/// volume_smoothing_s, valence_smoothing_s, zones ({part_mid_min, ...}).
void apply_config_json(ServerConfig& cfg, const nlohmann::json& j);

ServerConfig load_config_file(const std::filesystem::path& path, ServerConfig base = {});

}  // namespace groupfeed::server
