#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace groupfeed::metrics {

/// Opaque participant identifier, unique within a room. Never empty.
class ParticipantId {
 public:
  ParticipantId() = default;
  explicit ParticipantId(std::string id);

  const std::string& str() const noexcept { return id_; }
  bool empty() const noexcept { return id_.empty(); }

  friend auto operator<=>(const ParticipantId&, const ParticipantId&) = default;
  friend bool operator==(const ParticipantId&, const ParticipantId&) = default;

 private:
  std::string id_;
};

using Tick = std::uint64_t;

/// One participant's raw signals for a single tick.
struct FeatureFrame {
  ParticipantId participant;
  Tick tick = 0;
  bool speaking = false;
  double volume = 0.0;       // percent, [0, 100]
  double raw_valence = 0.0;  // [-100, +100], 0 = neutral

  friend bool operator==(const FeatureFrame&, const FeatureFrame&) = default;
};

class MetricsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Out-of-order, duplicate or gapped tick.
class SequencingError : public MetricsError {
 public:
  using MetricsError::MetricsError;
};

/// A room step was handed a frame set that does not cover exactly the members.
class IncompleteTickError : public MetricsError {
 public:
  using MetricsError::MetricsError;
};

class InvalidFrameError : public MetricsError {
 public:
  using MetricsError::MetricsError;
};

class ConfigError : public MetricsError {
 public:
  using MetricsError::MetricsError;
};

/// Throws InvalidFrameError when volume or valence is outside its range.
void validate_frame(const FeatureFrame& frame);

}  // namespace groupfeed::metrics
