#include "groupfeed/server/config.hpp"

#include <cmath>
#include <fstream>

#include "groupfeed/session/json_codec.hpp"

namespace groupfeed::server {

using metrics::ConfigError;
using nlohmann::json;

void ServerConfig::validate() const {
  engine.validate();
  if (max_members < 2 || max_members > 8) throw ConfigError("max_members must be within [2, 8]");
  if (!(session_duration_s > 0.0) || !std::isfinite(session_duration_s))
    throw ConfigError("session duration must be positive");
  if (!(emit_interval_s > 0.0) || !std::isfinite(emit_interval_s))
    throw ConfigError("emission interval must be positive");
  if (max_lead_ticks == 0) throw ConfigError("max_lead_ticks must be positive");
  if (session_ticks() == 0) throw ConfigError("session shorter than one tick");
}

metrics::Tick ServerConfig::session_ticks() const {
  return static_cast<metrics::Tick>(std::llround(session_duration_s * 1000.0 / engine.tick_duration_ms));
}

std::uint32_t ServerConfig::emit_every_ticks() const {
  const auto ticks = std::llround(emit_interval_s * 1000.0 / engine.tick_duration_ms);
  return ticks < 1 ? 1u : static_cast<std::uint32_t>(ticks);
}

namespace {

template <typename T>
void take(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) {
    try {
      out = it->get<T>();
    } catch (const json::exception&) {
      throw ConfigError(std::string("config key \"") + key + "\" has the wrong type");
    }
  }
}

session::RoomMode mode_from(const json& j, const char* what) {
  if (!j.is_string()) throw ConfigError(std::string(what) + " must be a string");
  auto mode = session::parse_room_mode(j.get<std::string>());
  if (!mode) throw ConfigError(std::string(what) + " must be \"feedback\" or \"nofeedback\"");
  return *mode;
}

}  // namespace

void apply_config_json(ServerConfig& cfg, const json& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  take(j, "port", cfg.port);
  take(j, "ws_port", cfg.ws_port);
  take(j, "websocket", cfg.websocket);
  take(j, "bind", cfg.bind_address);
  take(j, "max_members", cfg.max_members);
  take(j, "tick_duration_ms", cfg.engine.tick_duration_ms);
  take(j, "session_duration_s", cfg.session_duration_s);
  take(j, "emit_interval_s", cfg.emit_interval_s);
  take(j, "deadline_ticks", cfg.deadline_ticks);
  take(j, "max_lead_ticks", cfg.max_lead_ticks);
  take(j, "volume_smoothing_s", cfg.engine.volume_smoothing_s);
  take(j, "valence_smoothing_s", cfg.engine.valence_smoothing_s);
  if (auto it = j.find("log_dir"); it != j.end()) {
    if (!it->is_string()) throw ConfigError("log_dir must be a string");
    cfg.log_dir = it->get<std::string>();
  }
  if (auto it = j.find("default_mode"); it != j.end()) cfg.default_mode = mode_from(*it, "default_mode");
  if (auto it = j.find("rooms"); it != j.end()) {
    if (!it->is_object()) throw ConfigError("rooms must map room ids to modes");
    cfg.fixed_rooms.clear();
    for (const auto& [id, mode] : it->items()) cfg.fixed_rooms[id] = mode_from(mode, "room mode");
  }
  if (auto it = j.find("zones"); it != j.end()) {
    try {
      cfg.engine.zones = session::zone_config_from_json(*it, cfg.engine.zones);
    } catch (const session::ProtocolError& e) {
      throw ConfigError(e.what());
    }
  }
  cfg.validate();
}

ServerConfig load_config_file(const std::filesystem::path& path, ServerConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config file " + path.string() + " is not valid JSON");
  apply_config_json(base, j);
  return base;
}

}  // namespace groupfeed::server
