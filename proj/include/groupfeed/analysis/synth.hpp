#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "groupfeed/session/session_log.hpp"
#include "json.hpp"

namespace groupfeed::analysis {

class SynthError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Signal values held over [from_s, to_s). Unset fields fall back to the
/// participant's defaults.
struct ScheduleSegment {
  double from_s = 0.0;
  double to_s = 0.0;
  std::optional<bool> speaking;
  std::optional<double> volume;
  std::optional<double> valence;
};

struct ScriptedParticipant {
  std::string pid;
  bool default_speaking = false;
  double default_volume = 0.0;
  double default_valence = 0.0;
  std::vector<ScheduleSegment> segments;
};

/// A scripted session. JSON form:
///   {"room":"demo","tick_ms":100,"duration_s":900,"mode":"feedback",
///    "emit_interval_s":1,"start_ms":0,"zones":{...},
///    "jitter":{"volume":0,"valence":0},
///    "participants":[{"pid":"P1","default":{"spk":false,"vol":0,"val":0},
///                     "segments":[{"from":0,"to":60,"spk":true,"vol":10}]}]}
struct SynthSpec {
  std::string room = "synth";
  metrics::EngineConfig engine;
  double duration_s = 900.0;
  double emit_interval_s = 1.0;
  session::RoomMode mode = session::RoomMode::Feedback;
  std::int64_t start_ms = 0;
  double volume_jitter = 0.0;   // uniform +- amplitude, clamped to [0, 100]
  double valence_jitter = 0.0;  // uniform +- amplitude, clamped to [-100, 100]
  std::vector<ScriptedParticipant> participants;
};

SynthSpec parse_synth_spec(const nlohmann::json& j);

/// Frames for every participant and tick, frames[tick][participant] in
/// spec order. Throws SynthError on overlapping segments of one participant.
std::vector<std::vector<metrics::FeatureFrame>> script_frames(const SynthSpec& spec, std::uint64_t seed);

/// Runs the scripted frames through a recorder into `sink`.
void synthesize(const SynthSpec& spec, std::uint64_t seed, session::LogSink& sink);

}  // namespace groupfeed::analysis
