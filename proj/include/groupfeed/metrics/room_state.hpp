#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "groupfeed/metrics/overlap.hpp"
#include "groupfeed/metrics/participation.hpp"
#include "groupfeed/metrics/smoothing.hpp"
#include "groupfeed/metrics/types.hpp"
#include "groupfeed/metrics/zones.hpp"

namespace groupfeed::metrics {

struct EngineConfig {
  ZoneConfig zones;
  std::uint32_t tick_duration_ms = 100;
  double volume_smoothing_s = 3.0;
  double valence_smoothing_s = 2.0;

  void validate() const;

  std::size_t participation_window_ticks() const;
  std::uint32_t interruption_threshold_ticks() const;
  std::size_t volume_smoothing_ticks() const;
  std::size_t valence_smoothing_ticks() const;

  friend bool operator==(const EngineConfig&, const EngineConfig&) = default;
};

/// One participant's private feedback after a tick.
struct FeedbackSnapshot {
  ParticipantId participant;
  Tick tick = 0;
  double participation_pct = 0.0;
  LevelZone participation_zone = LevelZone::Low;
  std::uint64_t interruption_count = 0;
  VolumeZone volume_zone = VolumeZone::Silent;
  double volume_smoothed = 0.0;  // 0 while Silent
  double emotion_score = 50.0;
  EmotionZone emotion_zone = EmotionZone::Neutral;

  friend bool operator==(const FeedbackSnapshot&, const FeedbackSnapshot&) = default;
};

/// All metric state of one room. Purely a function of the frames and
/// membership changes applied to it.
class RoomState {
 public:
  explicit RoomState(EngineConfig cfg);

  void add_participant(const ParticipantId& pid);
  /// Drops every trace of the participant; a later add starts from scratch.
  void remove_participant(const ParticipantId& pid);
  bool has_participant(const ParticipantId& pid) const { return members_.contains(pid); }
  std::vector<ParticipantId> participants() const;

  /// Advances the room to `tick`. `frames` must contain exactly one frame
  /// per participant, all stamped `tick`, and `tick` must follow the last one
  /// stepped. The step is atomic: on any error no state changes. Snapshots
  /// come back ordered by participant id.
  std::vector<FeedbackSnapshot> step(Tick tick, std::span<const FeatureFrame> frames);

  std::optional<Tick> last_tick() const noexcept { return last_tick_; }
  const EngineConfig& config() const noexcept { return cfg_; }
  const OverlapTracker& overlaps() const noexcept { return overlaps_; }
  const ParticipationWindow& window(const ParticipantId& pid) const;

 private:
  struct Member {
    ParticipationWindow participation;
    TrailingMean volume;
    TrailingMean valence;
  };

  EngineConfig cfg_;
  std::map<ParticipantId, Member> members_;
  OverlapTracker overlaps_;
  std::optional<Tick> last_tick_;
};

}  // namespace groupfeed::metrics
