#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "groupfeed/metrics/room_state.hpp"

namespace groupfeed::session {

enum class RoomMode : std::uint8_t { Feedback, NoFeedback };

std::string_view to_string(RoomMode mode) noexcept;
std::optional<RoomMode> parse_room_mode(std::string_view s) noexcept;

struct Join {
  std::string room;
  metrics::ParticipantId pid;
  std::optional<RoomMode> mode;
};

struct JoinAck {
  std::string room;
  metrics::ParticipantId pid;
  metrics::EngineConfig engine;
  RoomMode mode = RoomMode::Feedback;
  std::uint32_t max_members = 4;
};

/// Broadcast when the room clock starts; frames are accepted from here on.
struct Start {
  std::uint32_t tick_ms = 100;
  metrics::Tick ticks = 0;  // session length in ticks
};

struct Frame {
  metrics::FeatureFrame frame;
};

struct Feedback {
  metrics::FeedbackSnapshot snapshot;
};

struct Signal {
  std::string from;
  std::string to;
  std::string data;
};

struct Leave {
  metrics::ParticipantId pid;
};

struct SessionEnd {
  std::string log_id;
};

struct Error {
  std::string code;
  std::string msg;
};

using Message = std::variant<Join, JoinAck, Start, Frame, Feedback, Signal, Leave, SessionEnd, Error>;

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One message as a single-line JSON object (no trailing newline).
std::string encode(const Message& msg);

/// Parses one line. Throws ProtocolError on malformed JSON, unknown "t",
/// missing or mistyped fields.
Message decode(std::string_view line);

// Error codes carried in {"t":"err"}.
namespace codes {
inline constexpr std::string_view kBadMessage = "BadMessage";
inline constexpr std::string_view kNotJoined = "NotJoined";
inline constexpr std::string_view kAlreadyJoined = "AlreadyJoined";
inline constexpr std::string_view kRoomFull = "RoomFull";
inline constexpr std::string_view kDuplicateId = "DuplicateId";
inline constexpr std::string_view kUnknownRoom = "UnknownRoom";
inline constexpr std::string_view kModeMismatch = "ModeMismatch";
inline constexpr std::string_view kSpoofed = "Spoofed";
inline constexpr std::string_view kStaleTick = "StaleTick";
inline constexpr std::string_view kDuplicateFrame = "DuplicateFrame";
inline constexpr std::string_view kFutureTick = "FutureTick";
inline constexpr std::string_view kOutOfRange = "OutOfRange";
inline constexpr std::string_view kNotStarted = "NotStarted";
inline constexpr std::string_view kBadFrame = "BadFrame";
inline constexpr std::string_view kUnknownPeer = "UnknownPeer";
inline constexpr std::string_view kPayloadTooLarge = "PayloadTooLarge";
inline constexpr std::string_view kPersistence = "Persistence";
}  // namespace codes

}  // namespace groupfeed::session
