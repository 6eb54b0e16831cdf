#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "groupfeed/metrics/types.hpp"

namespace groupfeed::metrics {

/// Ring buffer of speaking flags over the trailing participation window.
///
/// Until the buffer is full the percentage is taken over the ticks seen so
/// far, so a participant who has spoken for all of the first minute reads
/// 100 rather than 25.
class ParticipationWindow {
 public:
  explicit ParticipationWindow(std::size_t capacity_ticks);

  /// Pushes the frame's speaking flag and returns the updated percentage.
  /// The frame must carry the tick immediately after the previous one.
  double update(const FeatureFrame& frame);

  double percent() const noexcept;
  std::size_t capacity() const noexcept { return flags_.size(); }
  std::size_t size() const noexcept { return size_; }
  std::size_t speaking_ticks() const noexcept { return speaking_; }
  std::optional<Tick> last_tick() const noexcept { return last_tick_; }

  /// Flags currently in the window, oldest first.
  std::vector<bool> contents() const;

 private:
  std::vector<std::uint8_t> flags_;
  std::size_t head_ = 0;  // next write position
  std::size_t size_ = 0;
  std::size_t speaking_ = 0;
  std::optional<Tick> last_tick_;
};

}  // namespace groupfeed::metrics
