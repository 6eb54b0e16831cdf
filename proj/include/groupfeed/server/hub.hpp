#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "groupfeed/server/config.hpp"
#include "groupfeed/server/log_store.hpp"
#include "groupfeed/session/messages.hpp"
#include "groupfeed/session/session_log.hpp"

namespace groupfeed::server {

/// Monotonic time since an arbitrary origin. Real transports pass a steady
/// clock reading; tests pass a simulated one.
using Millis = std::chrono::milliseconds;
using ConnectionId = std::uint64_t;

/// Outgoing side of one client connection.
struct Endpoint {
  std::function<void(std::string line)> send;
  std::function<void()> close;  // optional
};

struct HubStats {
  std::uint64_t frames_accepted = 0;
  std::uint64_t frames_rejected = 0;
  std::uint64_t frames_synthesized = 0;
  std::uint64_t ticks_processed = 0;
  std::uint64_t feedback_delivered = 0;
  std::uint64_t feedback_skipped = 0;  // recipient disconnected
  std::uint64_t signals_relayed = 0;
  std::uint64_t spoof_attempts = 0;
  std::uint64_t sessions_ended = 0;
  std::uint64_t persistence_failures = 0;
};

/// Hosts every room. Not thread-safe: all calls for one hub must come from a
/// single thread (or be serialized), which also serializes each room.
///
/// Frames for a tick are buffered until every member has sent one, or until
/// the room clock is `deadline_ticks` past it, at which point stragglers are
/// synthesized as silence. Feedback goes only to the connection owning the
/// participant it describes, once per emission period, and only in feedback
/// mode. Every tick is logged regardless of mode.
class Hub {
 public:
  using WallClock = std::function<std::int64_t()>;  // epoch milliseconds

  Hub(ServerConfig cfg, std::shared_ptr<LogStore> store, WallClock wall_clock = {});
  ~Hub();
  Hub(const Hub&) = delete;
  Hub& operator=(const Hub&) = delete;

  ConnectionId connect(Endpoint endpoint);
  void receive(ConnectionId conn, std::string_view line, Millis now);
  void disconnect(ConnectionId conn, Millis now);

  /// Applies tick deadlines up to `now`; may end sessions.
  void advance(Millis now);

  /// Operator stop: flushes what has been stepped and closes the room.
  void stop_room(const std::string& room_id);
  void stop_all();

  const ServerConfig& config() const noexcept { return cfg_; }
  const HubStats& stats() const noexcept { return stats_; }
  std::vector<std::string> room_ids() const;
  /// Next unprocessed tick of a started room.
  std::optional<metrics::Tick> room_tick(const std::string& room_id) const;
  bool connection_flagged(ConnectionId conn) const;

 private:
  struct Member {
    std::optional<ConnectionId> conn;  // empty while disconnected
    double last_valence = 0.0;
  };

  struct Room {
    std::string id;
    session::RoomMode mode = session::RoomMode::Feedback;
    std::map<metrics::ParticipantId, Member> members;
    bool started = false;
    bool closed = false;
    Millis clock_origin{0};
    metrics::Tick next_tick = 0;
    metrics::Tick total_ticks = 0;
    std::map<metrics::Tick, std::map<metrics::ParticipantId, metrics::FeatureFrame>> pending;
    std::string log_id;
    std::unique_ptr<PersistentLog> log;
    std::unique_ptr<session::SessionRecorder> recorder;
  };

  struct Connection {
    Endpoint endpoint;
    std::string room;                    // empty when not joined
    std::optional<metrics::ParticipantId> pid;
    bool flagged = false;
  };

  void send(ConnectionId conn, const session::Message& msg);
  void send_error(ConnectionId conn, std::string_view code, std::string msg);

  void on_join(ConnectionId conn, const session::Join& join, Millis now);
  void on_frame(ConnectionId conn, const session::Frame& frame);
  void on_signal(ConnectionId conn, const session::Signal& sig);
  void on_leave(ConnectionId conn, const session::Leave& leave);

  void start_room(Room& room, Millis now);
  void drain_complete_ticks(Room& room);
  void process_tick(Room& room);
  void remove_member(Room& room, const metrics::ParticipantId& pid);
  void end_session(Room& room);
  void sweep_closed_rooms();

  ServerConfig cfg_;
  std::shared_ptr<LogStore> store_;
  WallClock wall_clock_;
  std::map<ConnectionId, Connection> connections_;
  std::map<std::string, std::unique_ptr<Room>> rooms_;
  ConnectionId next_conn_ = 1;
  std::uint64_t log_seq_ = 0;
  HubStats stats_;
};

}  // namespace groupfeed::server
