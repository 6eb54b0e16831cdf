#include "groupfeed/metrics/types.hpp"

#include <string>

namespace groupfeed::metrics {

ParticipantId::ParticipantId(std::string id) : id_(std::move(id)) {
  if (id_.empty()) throw std::invalid_argument("participant id must not be empty");
}

void validate_frame(const FeatureFrame& frame) {
  if (frame.participant.empty()) throw InvalidFrameError("frame has no participant");
  if (!(frame.volume >= 0.0 && frame.volume <= 100.0))
    throw InvalidFrameError("volume out of [0,100] for " + frame.participant.str());
  if (!(frame.raw_valence >= -100.0 && frame.raw_valence <= 100.0))
    throw InvalidFrameError("valence out of [-100,100] for " + frame.participant.str());
}

}  // namespace groupfeed::metrics
