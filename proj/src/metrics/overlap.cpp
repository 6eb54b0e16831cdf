#include "groupfeed/metrics/overlap.hpp"

#include <set>
#include <string>

namespace groupfeed::metrics {

OverlapTracker::OverlapTracker(std::uint32_t threshold_ticks) : threshold_ticks_(threshold_ticks) {
  if (threshold_ticks == 0) throw ConfigError("interruption threshold needs at least one tick");
}

OverlapTracker::PairKey OverlapTracker::key(const ParticipantId& a, const ParticipantId& b) {
  return a < b ? PairKey{a, b} : PairKey{b, a};
}

void OverlapTracker::add_participant(const ParticipantId& pid) {
  if (counts_.contains(pid)) return;
  for (const auto& [other, _] : counts_) pairs_.emplace(key(pid, other), PairState{});
  counts_.emplace(pid, 0);
}

void OverlapTracker::remove_participant(const ParticipantId& pid) {
  if (counts_.erase(pid) == 0) return;
  std::erase_if(pairs_, [&](const auto& kv) { return kv.first.first == pid || kv.first.second == pid; });
}

std::vector<std::pair<ParticipantId, std::uint64_t>> OverlapTracker::update(
    std::span<const FeatureFrame> frames) {
  if (frames.size() != counts_.size()) {
    throw IncompleteTickError("overlap update needs " + std::to_string(counts_.size()) +
                              " frames, got " + std::to_string(frames.size()));
  }
  std::map<ParticipantId, bool> speaking;
  for (const auto& f : frames) {
    if (!counts_.contains(f.participant))
      throw IncompleteTickError("frame for unknown participant " + f.participant.str());
    if (f.tick != frames.front().tick) throw IncompleteTickError("frames span more than one tick");
    if (!speaking.emplace(f.participant, f.speaking).second)
      throw IncompleteTickError("duplicate frame for " + f.participant.str());
  }

  std::set<ParticipantId> moved;
  for (auto& [k, state] : pairs_) {
    if (speaking.at(k.first) && speaking.at(k.second)) {
      ++state.run;
      if (!state.latched && state.run >= threshold_ticks_) {
        state.latched = true;
        ++counts_.at(k.first);
        ++counts_.at(k.second);
        moved.insert(k.first);
        moved.insert(k.second);
      }
    } else {
      state = PairState{};
    }
  }

  std::vector<std::pair<ParticipantId, std::uint64_t>> out;
  out.reserve(moved.size());
  for (const auto& pid : moved) out.emplace_back(pid, counts_.at(pid));
  return out;
}

std::uint64_t OverlapTracker::count(const ParticipantId& pid) const {
  auto it = counts_.find(pid);
  return it == counts_.end() ? 0 : it->second;
}

const OverlapTracker::PairState* OverlapTracker::pair(const ParticipantId& a,
                                                      const ParticipantId& b) const {
  auto it = pairs_.find(key(a, b));
  return it == pairs_.end() ? nullptr : &it->second;
}

}  // namespace groupfeed::metrics
