#include "groupfeed/metrics/participation.hpp"

#include <string>

namespace groupfeed::metrics {

ParticipationWindow::ParticipationWindow(std::size_t capacity_ticks) : flags_(capacity_ticks, 0) {
  if (capacity_ticks == 0) throw ConfigError("participation window needs at least one tick");
}

double ParticipationWindow::update(const FeatureFrame& frame) {
  if (last_tick_ && frame.tick != *last_tick_ + 1) {
    throw SequencingError("participation: expected tick " + std::to_string(*last_tick_ + 1) +
                          " for " + frame.participant.str() + ", got " +
                          std::to_string(frame.tick));
  }
  if (size_ == flags_.size()) {
    // head_ is also the oldest slot once the buffer has wrapped
    speaking_ -= flags_[head_];
  } else {
    ++size_;
  }
  flags_[head_] = frame.speaking ? 1 : 0;
  speaking_ += flags_[head_];
  head_ = (head_ + 1) % flags_.size();
  last_tick_ = frame.tick;
  return percent();
}

double ParticipationWindow::percent() const noexcept {
  if (size_ == 0) return 0.0;
  return 100.0 * static_cast<double>(speaking_) / static_cast<double>(size_);
}

std::vector<bool> ParticipationWindow::contents() const {
  std::vector<bool> out;
  out.reserve(size_);
  const std::size_t start = (head_ + flags_.size() - size_) % flags_.size();
  for (std::size_t i = 0; i < size_; ++i) out.push_back(flags_[(start + i) % flags_.size()] != 0);
  return out;
}

}  // namespace groupfeed::metrics
