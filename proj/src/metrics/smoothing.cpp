#include "groupfeed/metrics/smoothing.hpp"

#include <algorithm>

#include "groupfeed/metrics/types.hpp"

namespace groupfeed::metrics {

std::optional<double> smooth(std::span<const double> series, std::size_t horizon) {
  if (series.empty() || horizon == 0) return std::nullopt;
  const auto tail = series.last(std::min(horizon, series.size()));
  double sum = 0.0;
  for (double v : tail) sum += v;
  return sum / static_cast<double>(tail.size());
}

TrailingMean::TrailingMean(std::size_t horizon_ticks) : slots_(horizon_ticks) {
  if (horizon_ticks == 0) throw ConfigError("smoothing horizon needs at least one tick");
}

void TrailingMean::push(std::optional<double> sample) {
  slots_[head_] = sample;
  head_ = (head_ + 1) % slots_.size();
  size_ = std::min(size_ + 1, slots_.size());
}

std::optional<double> TrailingMean::mean() const {
  // Summed oldest to newest so the result does not depend on ring position.
  const std::size_t start = (head_ + slots_.size() - size_) % slots_.size();
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < size_; ++i) {
    const auto& s = slots_[(start + i) % slots_.size()];
    if (s) {
      sum += *s;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

}  // namespace groupfeed::metrics
