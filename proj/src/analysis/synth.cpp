#include "groupfeed/analysis/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "groupfeed/session/json_codec.hpp"

namespace groupfeed::analysis {

using nlohmann::json;

namespace {

template <typename T>
std::optional<T> opt(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) return std::nullopt;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw SynthError(std::string("synth spec field \"") + key + "\" has the wrong type");
  }
}

std::int64_t to_tick(double seconds, std::uint32_t tick_ms) {
  return std::llround(seconds * 1000.0 / tick_ms);
}

}  // namespace

SynthSpec parse_synth_spec(const json& j) {
  if (!j.is_object()) throw SynthError("synth spec must be a JSON object");
  SynthSpec s;
  s.room = opt<std::string>(j, "room").value_or(s.room);
  s.engine.tick_duration_ms = opt<std::uint32_t>(j, "tick_ms").value_or(s.engine.tick_duration_ms);
  s.engine.volume_smoothing_s = opt<double>(j, "vol_smooth_s").value_or(s.engine.volume_smoothing_s);
  s.engine.valence_smoothing_s = opt<double>(j, "val_smooth_s").value_or(s.engine.valence_smoothing_s);
  if (auto z = j.find("zones"); z != j.end()) {
    try {
      s.engine.zones = session::zone_config_from_json(*z);
    } catch (const session::ProtocolError& e) {
      throw SynthError(e.what());
    }
  }
  try {
    s.engine.validate();
  } catch (const metrics::ConfigError& e) {
    throw SynthError(e.what());
  }
  s.duration_s = opt<double>(j, "duration_s").value_or(s.duration_s);
  s.emit_interval_s = opt<double>(j, "emit_interval_s").value_or(s.emit_interval_s);
  if (!(s.duration_s > 0.0) || !(s.emit_interval_s > 0.0))
    throw SynthError("duration_s and emit_interval_s must be positive");
  if (auto m = opt<std::string>(j, "mode")) {
    auto mode = session::parse_room_mode(*m);
    if (!mode) throw SynthError("mode must be \"feedback\" or \"nofeedback\"");
    s.mode = *mode;
  }
  s.start_ms = opt<std::int64_t>(j, "start_ms").value_or(0);
  if (auto jit = j.find("jitter"); jit != j.end()) {
    s.volume_jitter = opt<double>(*jit, "volume").value_or(0.0);
    s.valence_jitter = opt<double>(*jit, "valence").value_or(0.0);
  }

  auto parts = j.find("participants");
  if (parts == j.end() || !parts->is_array() || parts->empty())
    throw SynthError("synth spec needs a non-empty participants array");
  std::set<std::string> seen;
  for (const auto& pj : *parts) {
    ScriptedParticipant p;
    p.pid = opt<std::string>(pj, "pid").value_or("");
    if (p.pid.empty()) throw SynthError("participant without pid");
    if (!seen.insert(p.pid).second) throw SynthError("duplicate participant " + p.pid);
    if (auto d = pj.find("default"); d != pj.end()) {
      p.default_speaking = opt<bool>(*d, "spk").value_or(false);
      p.default_volume = opt<double>(*d, "vol").value_or(0.0);
      p.default_valence = opt<double>(*d, "val").value_or(0.0);
    }
    if (auto segs = pj.find("segments"); segs != pj.end()) {
      for (const auto& sj : *segs) {
        ScheduleSegment seg;
        seg.from_s = opt<double>(sj, "from").value_or(0.0);
        seg.to_s = opt<double>(sj, "to").value_or(0.0);
        seg.speaking = opt<bool>(sj, "spk");
        seg.volume = opt<double>(sj, "vol");
        seg.valence = opt<double>(sj, "val");
        if (!(seg.to_s > seg.from_s) || seg.from_s < 0.0)
          throw SynthError("segment of " + p.pid + " must satisfy 0 <= from < to");
        p.segments.push_back(seg);
      }
    }
    s.participants.push_back(std::move(p));
  }
  return s;
}

std::vector<std::vector<metrics::FeatureFrame>> script_frames(const SynthSpec& spec, std::uint64_t seed) {
  const auto tick_ms = spec.engine.tick_duration_ms;
  const auto total = to_tick(spec.duration_s, tick_ms);
  if (total <= 0) throw SynthError("session shorter than one tick");

  // resolved per-participant timelines
  struct Value {
    bool spk;
    double vol;
    double val;
  };
  std::vector<std::vector<Value>> timeline;
  for (const auto& p : spec.participants) {
    std::vector<Value> line(static_cast<std::size_t>(total), Value{p.default_speaking, p.default_volume, p.default_valence});
    std::vector<std::uint8_t> covered(static_cast<std::size_t>(total), 0);
    for (const auto& seg : p.segments) {
      const auto from = std::clamp<std::int64_t>(to_tick(seg.from_s, tick_ms), 0, total);
      const auto to = std::clamp<std::int64_t>(to_tick(seg.to_s, tick_ms), 0, total);
      for (auto t = from; t < to; ++t) {
        if (covered[t])
          throw SynthError("overlapping schedule segments for " + p.pid + " at " +
                           std::to_string(t * tick_ms / 1000.0) + " s");
        covered[t] = 1;
        auto& v = line[t];
        if (seg.speaking) v.spk = *seg.speaking;
        if (seg.volume) v.vol = *seg.volume;
        if (seg.valence) v.val = *seg.valence;
      }
    }
    timeline.push_back(std::move(line));
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<std::vector<metrics::FeatureFrame>> frames(static_cast<std::size_t>(total));
  for (std::int64_t t = 0; t < total; ++t) {
    auto& row = frames[t];
    row.reserve(spec.participants.size());
    for (std::size_t i = 0; i < spec.participants.size(); ++i) {
      Value v = timeline[i][t];
      if (spec.volume_jitter > 0.0) v.vol = std::clamp(v.vol + spec.volume_jitter * unit(rng), 0.0, 100.0);
      if (spec.valence_jitter > 0.0)
        v.val = std::clamp(v.val + spec.valence_jitter * unit(rng), -100.0, 100.0);
      metrics::FeatureFrame f{metrics::ParticipantId(spec.participants[i].pid),
                              static_cast<metrics::Tick>(t), v.spk, v.vol, v.val};
      try {
        metrics::validate_frame(f);
      } catch (const metrics::InvalidFrameError& e) {
        throw SynthError(e.what());
      }
      row.push_back(std::move(f));
    }
  }
  return frames;
}

void synthesize(const SynthSpec& spec, std::uint64_t seed, session::LogSink& sink) {
  const auto frames = script_frames(spec, seed);

  session::LogHeader header;
  header.room = spec.room;
  header.start_ms = spec.start_ms;
  header.engine = spec.engine;
  header.mode = spec.mode;
  for (const auto& p : spec.participants) header.members.emplace_back(p.pid);
  const auto emit = std::llround(spec.emit_interval_s * 1000.0 / spec.engine.tick_duration_ms);
  header.emit_every_ticks = emit < 1 ? 1u : static_cast<std::uint32_t>(emit);
  header.ticks = frames.size();

  session::SessionRecorder recorder(std::move(header), sink);
  for (std::size_t t = 0; t < frames.size(); ++t) recorder.step(t, frames[t]);
}

}  // namespace groupfeed::analysis
