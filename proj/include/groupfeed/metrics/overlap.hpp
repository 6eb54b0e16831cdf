#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "groupfeed/metrics/types.hpp"

namespace groupfeed::metrics {

/// Counts interruption episodes per unordered participant pair.
///
/// A pair that speaks simultaneously for `threshold_ticks` consecutive ticks
/// adds one to both participants' counters; the pair then stays latched until
/// either of them stops, so a long overlap counts once.
class OverlapTracker {
 public:
  struct PairState {
    std::uint32_t run = 0;
    bool latched = false;
  };

  explicit OverlapTracker(std::uint32_t threshold_ticks);

  void add_participant(const ParticipantId& pid);
  void remove_participant(const ParticipantId& pid);
  bool contains(const ParticipantId& pid) const { return counts_.contains(pid); }

  /// Advances every pair by one tick. `frames` must hold exactly one frame
  /// per tracked participant, all on the same tick; otherwise nothing is
  /// changed and IncompleteTickError is thrown. Returns the participants whose
  /// counter moved, with the new value.
  std::vector<std::pair<ParticipantId, std::uint64_t>> update(std::span<const FeatureFrame> frames);

  std::uint64_t count(const ParticipantId& pid) const;
  const PairState* pair(const ParticipantId& a, const ParticipantId& b) const;
  std::uint32_t threshold_ticks() const noexcept { return threshold_ticks_; }

 private:
  using PairKey = std::pair<ParticipantId, ParticipantId>;  // first < second
  static PairKey key(const ParticipantId& a, const ParticipantId& b);

  std::uint32_t threshold_ticks_;
  std::map<PairKey, PairState> pairs_;
  std::map<ParticipantId, std::uint64_t> counts_;
};

}  // namespace groupfeed::metrics
