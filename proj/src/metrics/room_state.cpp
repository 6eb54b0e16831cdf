#include "groupfeed/metrics/room_state.hpp"

#include <cmath>
#include <string>

namespace groupfeed::metrics {

namespace {

std::size_t seconds_to_ticks(double seconds, std::uint32_t tick_ms) {
  const auto ticks = std::llround(seconds * 1000.0 / tick_ms);
  return ticks < 1 ? 1 : static_cast<std::size_t>(ticks);
}

}  // namespace

void EngineConfig::validate() const {
  zones.validate();
  if (tick_duration_ms < 20 || tick_duration_ms > 1000)
    throw ConfigError("tick duration must be within [20, 1000] ms");
  if (!(volume_smoothing_s > 0.0) || !(valence_smoothing_s > 0.0))
    throw ConfigError("smoothing horizons must be positive");
}

std::size_t EngineConfig::participation_window_ticks() const {
  return seconds_to_ticks(zones.participation_window_s, tick_duration_ms);
}

std::uint32_t EngineConfig::interruption_threshold_ticks() const {
  // ceil, with slack for decimal thresholds such as 2.9 s that are not exact in binary
  const double exact = zones.interruption_threshold_s * 1000.0 / tick_duration_ms;
  const auto ticks = static_cast<std::int64_t>(std::ceil(exact - 1e-9));
  return ticks < 1 ? 1u : static_cast<std::uint32_t>(ticks);
}

std::size_t EngineConfig::volume_smoothing_ticks() const {
  return seconds_to_ticks(volume_smoothing_s, tick_duration_ms);
}

std::size_t EngineConfig::valence_smoothing_ticks() const {
  return seconds_to_ticks(valence_smoothing_s, tick_duration_ms);
}

RoomState::RoomState(EngineConfig cfg)
    : cfg_((cfg.validate(), cfg)), overlaps_(cfg_.interruption_threshold_ticks()) {}

void RoomState::add_participant(const ParticipantId& pid) {
  if (pid.empty()) throw std::invalid_argument("participant id must not be empty");
  if (members_.contains(pid)) return;
  members_.emplace(pid, Member{ParticipationWindow(cfg_.participation_window_ticks()),
                               TrailingMean(cfg_.volume_smoothing_ticks()),
                               TrailingMean(cfg_.valence_smoothing_ticks())});
  overlaps_.add_participant(pid);
}

void RoomState::remove_participant(const ParticipantId& pid) {
  members_.erase(pid);
  overlaps_.remove_participant(pid);
}

std::vector<ParticipantId> RoomState::participants() const {
  std::vector<ParticipantId> out;
  out.reserve(members_.size());
  for (const auto& [pid, _] : members_) out.push_back(pid);
  return out;
}

const ParticipationWindow& RoomState::window(const ParticipantId& pid) const {
  auto it = members_.find(pid);
  if (it == members_.end()) throw std::out_of_range("no participant " + pid.str());
  return it->second.participation;
}

std::vector<FeedbackSnapshot> RoomState::step(Tick tick, std::span<const FeatureFrame> frames) {
  if (last_tick_ && tick != *last_tick_ + 1) {
    throw SequencingError("room expected tick " + std::to_string(*last_tick_ + 1) + ", got " +
                          std::to_string(tick));
  }
  if (frames.size() != members_.size()) {
    throw IncompleteTickError("tick " + std::to_string(tick) + " needs " +
                              std::to_string(members_.size()) + " frames, got " +
                              std::to_string(frames.size()));
  }
  std::map<ParticipantId, const FeatureFrame*> by_pid;
  for (const auto& f : frames) {
    if (f.tick != tick)
      throw SequencingError("frame for " + f.participant.str() + " carries tick " +
                            std::to_string(f.tick) + " in step " + std::to_string(tick));
    validate_frame(f);
    auto member = members_.find(f.participant);
    if (member == members_.end())
      throw IncompleteTickError("frame for non-member " + f.participant.str());
    const auto last = member->second.participation.last_tick();
    if (last && *last + 1 != tick)
      throw SequencingError("participant " + f.participant.str() + " is out of step");
    if (!by_pid.emplace(f.participant, &f).second)
      throw IncompleteTickError("duplicate frame for " + f.participant.str());
  }

  // Everything validated; from here on nothing throws for well-formed input.
  overlaps_.update(frames);

  std::vector<FeedbackSnapshot> out;
  out.reserve(members_.size());
  for (auto& [pid, member] : members_) {
    const FeatureFrame& f = *by_pid.at(pid);

    FeedbackSnapshot snap;
    snap.participant = pid;
    snap.tick = tick;
    snap.participation_pct = member.participation.update(f);
    snap.participation_zone = classify_participation(snap.participation_pct, cfg_.zones);
    snap.interruption_count = overlaps_.count(pid);

    const bool silent = classify_volume(f.volume, cfg_.zones) == VolumeZone::Silent;
    member.volume.push(silent ? std::nullopt : std::optional<double>(f.volume));
    if (auto v = member.volume.mean()) {
      snap.volume_smoothed = *v;
      snap.volume_zone = classify_volume(*v, cfg_.zones);
    } else {
      snap.volume_smoothed = 0.0;
      snap.volume_zone = VolumeZone::Silent;
    }

    member.valence.push(f.raw_valence);
    snap.emotion_score = remap_valence(member.valence.mean().value_or(0.0));
    snap.emotion_zone = classify_emotion(snap.emotion_score, cfg_.zones);
    out.push_back(std::move(snap));
  }
  last_tick_ = tick;
  return out;
}

}  // namespace groupfeed::metrics
