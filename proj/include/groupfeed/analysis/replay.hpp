#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "groupfeed/metrics/room_state.hpp"
#include "groupfeed/session/session_log.hpp"

namespace groupfeed::analysis {

/// A logged snapshot that disagrees with the recomputed one. `line` is 0 when
/// the log is missing a snapshot; `expected` is empty for an unexpected one.
struct Divergence {
  metrics::Tick tick = 0;
  std::string participant;
  std::size_t line = 0;
  std::string expected;
  std::string logged;
};

struct ReplayResult {
  session::LogHeader header;
  /// Recomputed snapshots for every emission tick, in log order.
  std::vector<metrics::FeedbackSnapshot> snapshots;
  std::vector<Divergence> divergences;
  std::uint64_t ticks = 0;
};

/// Re-runs the logged frames through a fresh room and diffs the result
/// against the logged snapshots. Throws session::LogParseError when the
/// frame stream itself is inconsistent.
ReplayResult replay(const session::SessionLog& log);
ReplayResult replay_file(const std::filesystem::path& path);

/// Share of a participant's emitted snapshots spent in each zone, in percent.
struct ZoneOccupancy {
  std::string participant;
  std::size_t snapshots = 0;
  std::array<double, 3> participation{};  // low, mid, high
  std::array<double, 4> volume{};         // silent, low, mid, high
  std::array<double, 3> emotion{};        // neg, neu, pos
  std::uint64_t interruptions = 0;        // count in the participant's last snapshot
};

/// One row per participant, ordered by participant id.
std::vector<ZoneOccupancy> summarize(std::span<const metrics::FeedbackSnapshot> snapshots);

/// Columns: participant,snapshots,part_low,part_mid,part_high,vol_silent,
/// vol_low,vol_mid,vol_high,emo_neg,emo_neu,emo_pos,interruptions
void write_occupancy_csv(std::ostream& out, std::span<const ZoneOccupancy> rows);

}  // namespace groupfeed::analysis
