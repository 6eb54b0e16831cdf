#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace groupfeed::metrics {

/// Mean of the last `horizon` values of `series` (all of them if shorter).
/// std::nullopt when there is nothing to average.
std::optional<double> smooth(std::span<const double> series, std::size_t horizon);

/// Streaming trailing mean over a fixed number of ticks. Ticks pushed as
/// std::nullopt take up a slot but are left out of the mean.
class TrailingMean {
 public:
  explicit TrailingMean(std::size_t horizon_ticks);

  void push(std::optional<double> sample);
  std::optional<double> mean() const;
  std::size_t horizon() const noexcept { return slots_.size(); }

 private:
  std::vector<std::optional<double>> slots_;
  std::size_t head_ = 0;
  std::size_t size_ = 0;
};

}  // namespace groupfeed::metrics
