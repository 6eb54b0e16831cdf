#pragma once

#include "json.hpp"

#include "groupfeed/metrics/room_state.hpp"

namespace groupfeed::session {

nlohmann::json zone_config_to_json(const metrics::ZoneConfig& cfg);
/// Missing keys keep their defaults; the result is validated.
metrics::ZoneConfig zone_config_from_json(const nlohmann::json& j, metrics::ZoneConfig base = {});

/// {"tick_ms":..,"cfg":{zones},"vol_smooth_s":..,"val_smooth_s":..} spread into `j`.
void put_engine_config(nlohmann::json& j, const metrics::EngineConfig& cfg);
metrics::EngineConfig engine_config_from_json(const nlohmann::json& j);

nlohmann::json frame_to_json(const metrics::FeatureFrame& f);
nlohmann::json snapshot_to_json(const metrics::FeedbackSnapshot& s);

metrics::FeatureFrame frame_from_json(const nlohmann::json& j);
metrics::FeedbackSnapshot snapshot_from_json(const nlohmann::json& j);

}  // namespace groupfeed::session
