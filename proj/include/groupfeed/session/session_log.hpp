#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "groupfeed/metrics/room_state.hpp"
#include "groupfeed/session/messages.hpp"

namespace groupfeed::session {

inline constexpr int kLogVersion = 1;

/// First line of every session log:
/// {"t":"hdr","v":1,"room":..,"start_ms":..,"tick_ms":..,"cfg":{..},
///  "vol_smooth_s":..,"val_smooth_s":..,"mode":..,"members":[..],
///  "emit_ticks":..,"ticks":..}
struct LogHeader {
  std::string room;
  std::int64_t start_ms = 0;  // wall-clock epoch milliseconds at clock start
  metrics::EngineConfig engine;
  RoomMode mode = RoomMode::Feedback;
  std::vector<metrics::ParticipantId> members;  // present at clock start
  std::uint32_t emit_every_ticks = 10;
  metrics::Tick ticks = 9000;  // planned session length

  friend bool operator==(const LogHeader&, const LogHeader&) = default;
};

/// Membership change that takes effect before `tick` is stepped.
struct MemberEvent {
  enum class Kind : std::uint8_t { Join, Leave };
  Kind kind = Kind::Join;
  metrics::Tick tick = 0;
  metrics::ParticipantId pid;

  friend bool operator==(const MemberEvent&, const MemberEvent&) = default;
};

using LogRecord = std::variant<metrics::FeatureFrame, metrics::FeedbackSnapshot, MemberEvent>;

struct LoggedRecord {
  std::size_t line = 0;  // 1-based line number in the file
  LogRecord record;
  std::string text;  // the line as written
};

struct SessionLog {
  LogHeader header;
  std::vector<LoggedRecord> records;
};

class LogParseError : public std::runtime_error {
 public:
  LogParseError(std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Header names a log version or engine configuration this build cannot replay.
class ConfigMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string encode_header(const LogHeader& header);
std::string encode_record(const LogRecord& record);

SessionLog parse_session_log(std::istream& in);
SessionLog read_session_log(const std::filesystem::path& path);

/// Destination for session log lines, in order. Lines carry no newline.
class LogSink {
 public:
  virtual ~LogSink() = default;
  virtual void append(std::string_view line) = 0;
};

class MemoryLogSink final : public LogSink {
 public:
  void append(std::string_view line) override { lines_.emplace_back(line); }
  const std::vector<std::string>& lines() const noexcept { return lines_; }
  /// All lines joined with '\n', each terminated.
  std::string text() const;

 private:
  std::vector<std::string> lines_;
};

/// Drives a room's metrics and writes everything needed to replay it.
///
/// Every stepped frame is logged; snapshots are logged only on emission
/// ticks, i.e. the last tick of each emission period.
class SessionRecorder {
 public:
  struct StepResult {
    std::vector<metrics::FeedbackSnapshot> snapshots;
    bool emitted = false;
  };

  /// Writes the header and registers its members.
  SessionRecorder(LogHeader header, LogSink& sink);

  void join(const metrics::ParticipantId& pid, metrics::Tick effective_tick);
  void leave(const metrics::ParticipantId& pid, metrics::Tick effective_tick);

  /// Steps the room and logs the tick. Frames are logged in participant order.
  StepResult step(metrics::Tick tick, std::span<const metrics::FeatureFrame> frames);

  const LogHeader& header() const noexcept { return header_; }
  const metrics::RoomState& state() const noexcept { return room_; }

 private:
  LogHeader header_;
  LogSink& sink_;
  metrics::RoomState room_;
};

constexpr bool is_emit_tick(metrics::Tick tick, std::uint32_t emit_every_ticks) noexcept {
  return emit_every_ticks <= 1 || (tick + 1) % emit_every_ticks == 0;
}

}  // namespace groupfeed::session
