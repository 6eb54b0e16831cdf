#include "groupfeed/analysis/replay.hpp"

#include <iomanip>
#include <map>
#include <ostream>

namespace groupfeed::analysis {

using metrics::FeatureFrame;
using metrics::FeedbackSnapshot;
using metrics::Tick;
using session::LogParseError;

namespace {

class Replayer {
 public:
  explicit Replayer(const session::LogHeader& header) : room_(header.engine), header_(header) {
    for (const auto& m : header.members) room_.add_participant(m);
    result_.header = header;
  }

  void frame(const session::LoggedRecord& rec, const FeatureFrame& f) {
    if (!buffer_.empty() && f.tick != buffer_tick_) flush();
    if (buffer_.empty()) {
      close_expected();
      buffer_tick_ = f.tick;
      buffer_line_ = rec.line;
    }
    buffer_.push_back(f);
  }

  void snapshot(const session::LoggedRecord& rec, const FeedbackSnapshot& s) {
    if (!buffer_.empty() && s.tick == buffer_tick_) flush();
    const std::string& pid = s.participant.str();
    if (!expected_tick_ || *expected_tick_ != s.tick) {
      result_.divergences.push_back(Divergence{s.tick, pid, rec.line, "", rec.text});
      return;
    }
    auto it = expected_.find(pid);
    if (it == expected_.end()) {
      result_.divergences.push_back(Divergence{s.tick, pid, rec.line, "", rec.text});
      return;
    }
    if (it->second != rec.text) result_.divergences.push_back(Divergence{s.tick, pid, rec.line, it->second, rec.text});
    expected_.erase(it);
  }

  void member(const session::LoggedRecord& rec, const session::MemberEvent& e) {
    if (!buffer_.empty()) flush();
    close_expected();
    const Tick next = room_.last_tick() ? *room_.last_tick() + 1 : 0;
    if (room_.last_tick() && e.tick != next)
      throw LogParseError(rec.line, "membership change for tick " + std::to_string(e.tick) +
                                        " but the next tick is " + std::to_string(next));
    if (e.kind == session::MemberEvent::Kind::Join) {
      room_.add_participant(e.pid);
    } else {
      room_.remove_participant(e.pid);
    }
  }

  ReplayResult finish() {
    if (!buffer_.empty()) flush();
    close_expected();
    return std::move(result_);
  }

 private:
  void flush() {
    try {
      // ticks with an empty room leave no frame records
      while (room_.last_tick() && *room_.last_tick() + 1 < buffer_tick_ && room_.participants().empty())
        step(*room_.last_tick() + 1, {});
      const auto snaps = step(buffer_tick_, buffer_);
      if (session::is_emit_tick(buffer_tick_, header_.emit_every_ticks)) {
        expected_tick_ = buffer_tick_;
        for (const auto& s : snaps) {
          expected_[s.participant.str()] = session::encode_record(s);
          result_.snapshots.push_back(s);
        }
      }
    } catch (const metrics::MetricsError& e) {
      throw LogParseError(buffer_line_, std::string("frames do not replay: ") + e.what());
    }
    buffer_.clear();
  }

  std::vector<FeedbackSnapshot> step(Tick tick, std::span<const FeatureFrame> frames) {
    ++result_.ticks;
    return room_.step(tick, frames);
  }

  void close_expected() {
    if (!expected_tick_) return;
    for (const auto& [pid, text] : expected_)
      result_.divergences.push_back(Divergence{*expected_tick_, pid, 0, text, ""});
    expected_.clear();
    expected_tick_.reset();
  }

  metrics::RoomState room_;
  const session::LogHeader& header_;
  ReplayResult result_;
  std::vector<FeatureFrame> buffer_;
  Tick buffer_tick_ = 0;
  std::size_t buffer_line_ = 0;
  std::optional<Tick> expected_tick_;
  std::map<std::string, std::string> expected_;
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

ReplayResult replay(const session::SessionLog& log) {
  Replayer r(log.header);
  for (const auto& rec : log.records) {
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, FeatureFrame>) {
            r.frame(rec, v);
          } else if constexpr (std::is_same_v<T, FeedbackSnapshot>) {
            r.snapshot(rec, v);
          } else {
            r.member(rec, v);
          }
        },
        rec.record);
  }
  return r.finish();
}

ReplayResult replay_file(const std::filesystem::path& path) { return replay(session::read_session_log(path)); }

std::vector<ZoneOccupancy> summarize(std::span<const FeedbackSnapshot> snapshots) {
  struct Counts {
    std::size_t n = 0;
    std::array<std::size_t, 3> part{};
    std::array<std::size_t, 4> vol{};
    std::array<std::size_t, 3> emo{};
    std::uint64_t interruptions = 0;
    Tick last_tick = 0;
  };
  std::map<std::string, Counts> by_pid;
  for (const auto& s : snapshots) {
    auto& c = by_pid[s.participant.str()];
    ++c.n;
    ++c.part[static_cast<std::size_t>(s.participation_zone)];
    ++c.vol[static_cast<std::size_t>(s.volume_zone)];
    ++c.emo[static_cast<std::size_t>(s.emotion_zone)];
    if (c.n == 1 || s.tick >= c.last_tick) {
      c.last_tick = s.tick;
      c.interruptions = s.interruption_count;
    }
  }

  std::vector<ZoneOccupancy> out;
  for (const auto& [pid, c] : by_pid) {
    ZoneOccupancy z;
    z.participant = pid;
    z.snapshots = c.n;
    const double total = static_cast<double>(c.n);
    for (std::size_t i = 0; i < 3; ++i) z.participation[i] = 100.0 * static_cast<double>(c.part[i]) / total;
    for (std::size_t i = 0; i < 4; ++i) z.volume[i] = 100.0 * static_cast<double>(c.vol[i]) / total;
    for (std::size_t i = 0; i < 3; ++i) z.emotion[i] = 100.0 * static_cast<double>(c.emo[i]) / total;
    z.interruptions = c.interruptions;
    out.push_back(z);
  }
  return out;
}

void write_occupancy_csv(std::ostream& out, std::span<const ZoneOccupancy> rows) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << "participant,snapshots,part_low,part_mid,part_high,vol_silent,vol_low,vol_mid,vol_high,"
         "emo_neg,emo_neu,emo_pos,interruptions\n";
  out << std::setprecision(10);
  for (const auto& r : rows) {
    out << csv_field(r.participant) << ',' << r.snapshots;
    for (double v : r.participation) out << ',' << v;
    for (double v : r.volume) out << ',' << v;
    for (double v : r.emotion) out << ',' << v;
    out << ',' << r.interruptions << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

}  // namespace groupfeed::analysis
