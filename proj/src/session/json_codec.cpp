#include "groupfeed/session/json_codec.hpp"

#include "groupfeed/session/messages.hpp"
#include "json_fields.hpp"

namespace groupfeed::session {

using nlohmann::json;
using namespace detail;

json zone_config_to_json(const metrics::ZoneConfig& c) {
  return json{{"part_mid_min", c.participation_mid_min},
              {"part_mid_max", c.participation_mid_max},
              {"vol_noise_max", c.volume_noise_max},
              {"vol_low_max", c.volume_low_max},
              {"vol_mid_max", c.volume_mid_max},
              {"emo_neu_min", c.emotion_neutral_min},
              {"emo_neu_max", c.emotion_neutral_max},
              {"intr_s", c.interruption_threshold_s},
              {"part_window_s", c.participation_window_s}};
}

metrics::ZoneConfig zone_config_from_json(const json& j, metrics::ZoneConfig c) {
  if (!j.is_object()) throw ProtocolError("zone config must be an object");
  maybe(j, "part_mid_min", c.participation_mid_min);
  maybe(j, "part_mid_max", c.participation_mid_max);
  maybe(j, "vol_noise_max", c.volume_noise_max);
  maybe(j, "vol_low_max", c.volume_low_max);
  maybe(j, "vol_mid_max", c.volume_mid_max);
  maybe(j, "emo_neu_min", c.emotion_neutral_min);
  maybe(j, "emo_neu_max", c.emotion_neutral_max);
  maybe(j, "intr_s", c.interruption_threshold_s);
  maybe(j, "part_window_s", c.participation_window_s);
  try {
    c.validate();
  } catch (const metrics::ConfigError& e) {
    throw ProtocolError(e.what());
  }
  return c;
}

void put_engine_config(json& j, const metrics::EngineConfig& cfg) {
  j["tick_ms"] = cfg.tick_duration_ms;
  j["cfg"] = zone_config_to_json(cfg.zones);
  j["vol_smooth_s"] = cfg.volume_smoothing_s;
  j["val_smooth_s"] = cfg.valence_smoothing_s;
}

metrics::EngineConfig engine_config_from_json(const json& j) {
  metrics::EngineConfig cfg;
  const auto tick = required_uint(j, "tick_ms");
  if (tick > 1000) throw ProtocolError("tick_ms out of range");
  cfg.tick_duration_ms = static_cast<std::uint32_t>(tick);
  if (auto it = j.find("cfg"); it != j.end()) cfg.zones = zone_config_from_json(*it);
  maybe(j, "vol_smooth_s", cfg.volume_smoothing_s);
  maybe(j, "val_smooth_s", cfg.valence_smoothing_s);
  try {
    cfg.validate();
  } catch (const metrics::ConfigError& e) {
    throw ProtocolError(e.what());
  }
  return cfg;
}

json frame_to_json(const metrics::FeatureFrame& f) {
  return json{{"t", "frame"},         {"pid", f.participant.str()}, {"tick", f.tick},
              {"spk", f.speaking},    {"vol", f.volume},            {"val", f.raw_valence}};
}

json snapshot_to_json(const metrics::FeedbackSnapshot& s) {
  return json{{"t", "fb"},
              {"pid", s.participant.str()},
              {"tick", s.tick},
              {"part_pct", s.participation_pct},
              {"part_zone", metrics::to_string(s.participation_zone)},
              {"intr", s.interruption_count},
              {"vol_zone", metrics::to_string(s.volume_zone)},
              {"emo", s.emotion_score},
              {"emo_zone", metrics::to_string(s.emotion_zone)}};
}

metrics::FeatureFrame frame_from_json(const json& j) {
  metrics::FeatureFrame f;
  f.participant = required_pid(j, "pid");
  f.tick = required_uint(j, "tick");
  f.speaking = required<bool>(j, "spk");
  f.volume = required_number(j, "vol");
  f.raw_valence = required_number(j, "val");
  return f;
}

metrics::FeedbackSnapshot snapshot_from_json(const json& j) {
  metrics::FeedbackSnapshot s;
  s.participant = required_pid(j, "pid");
  s.tick = required_uint(j, "tick");
  s.participation_pct = required_number(j, "part_pct");
  s.interruption_count = required_uint(j, "intr");
  s.emotion_score = required_number(j, "emo");
  auto pz = metrics::parse_level_zone(required<std::string>(j, "part_zone"));
  auto vz = metrics::parse_volume_zone(required<std::string>(j, "vol_zone"));
  auto ez = metrics::parse_emotion_zone(required<std::string>(j, "emo_zone"));
  if (!pz || !vz || !ez) throw ProtocolError("unknown zone name in feedback record");
  s.participation_zone = *pz;
  s.volume_zone = *vz;
  s.emotion_zone = *ez;
  return s;
}

}  // namespace groupfeed::session
