#include "groupfeed/server/hub.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>

namespace groupfeed::server {

using metrics::FeatureFrame;
using metrics::ParticipantId;
using metrics::Tick;
namespace codes = session::codes;

namespace {

std::string log_file_name(const std::string& room, std::int64_t start_ms, std::uint64_t seq) {
  std::string safe;
  for (char c : room) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_';
    safe += ok ? c : '_';
  }
  return safe + "-" + std::to_string(start_ms) + "-" + std::to_string(seq) + ".log";
}

std::int64_t system_epoch_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

}  // namespace

Hub::Hub(ServerConfig cfg, std::shared_ptr<LogStore> store, WallClock wall_clock)
    : cfg_(std::move(cfg)), store_(std::move(store)), wall_clock_(std::move(wall_clock)) {
  cfg_.validate();
  if (!store_) throw std::invalid_argument("hub needs a log store");
  if (!wall_clock_) wall_clock_ = system_epoch_ms;
}

Hub::~Hub() = default;

ConnectionId Hub::connect(Endpoint endpoint) {
  const ConnectionId id = next_conn_++;
  connections_.emplace(id, Connection{std::move(endpoint), {}, std::nullopt, false});
  return id;
}

void Hub::send(ConnectionId conn, const session::Message& msg) {
  auto it = connections_.find(conn);
  if (it == connections_.end() || !it->second.endpoint.send) return;
  it->second.endpoint.send(session::encode(msg));
}

void Hub::send_error(ConnectionId conn, std::string_view code, std::string msg) {
  send(conn, session::Error{std::string(code), std::move(msg)});
}

void Hub::receive(ConnectionId conn, std::string_view line, Millis now) {
  if (!connections_.contains(conn)) return;
  session::Message msg;
  try {
    msg = session::decode(line);
  } catch (const session::ProtocolError& e) {
    send_error(conn, codes::kBadMessage, e.what());
    return;
  }

  if (auto* m = std::get_if<session::Join>(&msg)) {
    on_join(conn, *m, now);
  } else if (auto* m = std::get_if<session::Frame>(&msg)) {
    on_frame(conn, *m);
  } else if (auto* m = std::get_if<session::Signal>(&msg)) {
    on_signal(conn, *m);
  } else if (auto* m = std::get_if<session::Leave>(&msg)) {
    on_leave(conn, *m);
  } else {
    send_error(conn, codes::kBadMessage, "clients may only send join, frame, sig and leave");
  }
  sweep_closed_rooms();
}

void Hub::on_join(ConnectionId conn, const session::Join& join, Millis now) {
  auto& c = connections_.at(conn);
  if (c.pid) {
    send_error(conn, codes::kAlreadyJoined, "connection already joined room " + c.room);
    return;
  }

  auto it = rooms_.find(join.room);
  if (it == rooms_.end()) {
    session::RoomMode mode = join.mode.value_or(cfg_.default_mode);
    if (!cfg_.fixed_rooms.empty()) {
      auto fixed = cfg_.fixed_rooms.find(join.room);
      if (fixed == cfg_.fixed_rooms.end()) {
        send_error(conn, codes::kUnknownRoom, "no room " + join.room);
        return;
      }
      mode = fixed->second;
    }
    auto room = std::make_unique<Room>();
    room->id = join.room;
    room->mode = mode;
    room->total_ticks = cfg_.session_ticks();
    it = rooms_.emplace(join.room, std::move(room)).first;
  }
  Room& room = *it->second;
  if (join.mode && *join.mode != room.mode) {
    send_error(conn, codes::kModeMismatch,
               "room " + room.id + " runs in " + std::string(session::to_string(room.mode)) + " mode");
    return;
  }

  auto member = room.members.find(join.pid);
  if (member != room.members.end()) {
    if (member->second.conn) {
      send_error(conn, codes::kDuplicateId, join.pid.str() + " is already in room " + room.id);
      return;
    }
    member->second.conn = conn;  // reconnect after a dropped connection
  } else {
    if (room.members.size() >= cfg_.max_members) {
      send_error(conn, codes::kRoomFull, "room " + room.id + " is full");
      return;
    }
    room.members.emplace(join.pid, Member{conn, 0.0});
    if (room.started) room.recorder->join(join.pid, room.next_tick);
  }
  c.room = room.id;
  c.pid = join.pid;

  send(conn, session::JoinAck{room.id, join.pid, cfg_.engine, room.mode, cfg_.max_members});
  spdlog::info("room {}: {} joined ({}/{})", room.id, join.pid.str(), room.members.size(),
               cfg_.max_members);

  if (room.started) {
    send(conn, session::Start{cfg_.engine.tick_duration_ms, room.total_ticks});
  } else if (room.members.size() == cfg_.max_members) {
    start_room(room, now);
  }
}

void Hub::start_room(Room& room, Millis now) {
  room.started = true;
  room.clock_origin = now;
  room.next_tick = 0;

  session::LogHeader header;
  header.room = room.id;
  header.start_ms = wall_clock_();
  header.engine = cfg_.engine;
  header.mode = room.mode;
  for (const auto& [pid, _] : room.members) header.members.push_back(pid);
  header.emit_every_ticks = cfg_.emit_every_ticks();
  header.ticks = room.total_ticks;

  room.log_id = log_file_name(room.id, header.start_ms, log_seq_++);
  room.log = store_->open(room.log_id);
  room.recorder = std::make_unique<session::SessionRecorder>(std::move(header), *room.log);
  spdlog::info("room {}: clock started, logging to {}", room.id, room.log_id);

  const session::Start start{cfg_.engine.tick_duration_ms, room.total_ticks};
  for (const auto& [pid, m] : room.members)
    if (m.conn) send(*m.conn, start);
}

void Hub::on_frame(ConnectionId conn, const session::Frame& msg) {
  const auto& c = connections_.at(conn);
  const FeatureFrame& f = msg.frame;
  auto reject = [&](std::string_view code, std::string text) {
    ++stats_.frames_rejected;
    send_error(conn, code, std::move(text));
  };
  if (!c.pid) return reject(codes::kNotJoined, "join a room before sending frames");
  if (f.participant != *c.pid) {
    ++stats_.spoof_attempts;
    connections_.at(conn).flagged = true;
    spdlog::warn("connection {} ({}) sent a frame for {}", conn, c.pid->str(), f.participant.str());
    return reject(codes::kSpoofed, "frame participant does not match the joined id");
  }
  Room& room = *rooms_.at(c.room);
  if (!room.started) return reject(codes::kNotStarted, "room clock has not started");
  try {
    metrics::validate_frame(f);
  } catch (const metrics::InvalidFrameError& e) {
    return reject(codes::kBadFrame, e.what());
  }
  if (f.tick < room.next_tick)
    return reject(codes::kStaleTick, "tick " + std::to_string(f.tick) + " already processed");
  if (f.tick >= room.total_ticks)
    return reject(codes::kOutOfRange, "tick " + std::to_string(f.tick) + " is past the session end");
  if (f.tick >= room.next_tick + cfg_.max_lead_ticks)
    return reject(codes::kFutureTick, "tick " + std::to_string(f.tick) + " is too far ahead");
  if (!room.pending[f.tick].emplace(f.participant, f).second)
    return reject(codes::kDuplicateFrame, "frame for tick " + std::to_string(f.tick) + " already received");
  ++stats_.frames_accepted;
  drain_complete_ticks(room);
}

void Hub::drain_complete_ticks(Room& room) {
  while (room.started && !room.closed) {
    auto it = room.pending.find(room.next_tick);
    if (it == room.pending.end()) return;
    const bool complete = std::all_of(room.members.begin(), room.members.end(),
                                      [&](const auto& m) { return it->second.contains(m.first); });
    if (!complete) return;
    process_tick(room);
  }
}

void Hub::process_tick(Room& room) {
  const Tick tick = room.next_tick;
  std::map<ParticipantId, FeatureFrame> received;
  if (auto it = room.pending.find(tick); it != room.pending.end()) {
    received = std::move(it->second);
    room.pending.erase(it);
  }

  std::vector<FeatureFrame> frames;
  frames.reserve(room.members.size());
  for (auto& [pid, member] : room.members) {
    if (auto f = received.find(pid); f != received.end()) {
      member.last_valence = f->second.raw_valence;
      frames.push_back(f->second);
    } else {
      ++stats_.frames_synthesized;
      frames.push_back(FeatureFrame{pid, tick, false, 0.0, member.last_valence});
    }
  }

  const auto result = room.recorder->step(tick, frames);
  ++stats_.ticks_processed;
  room.next_tick = tick + 1;

  if (result.emitted && room.mode == session::RoomMode::Feedback) {
    for (const auto& snap : result.snapshots) {
      const auto& member = room.members.at(snap.participant);
      if (member.conn) {
        send(*member.conn, session::Feedback{snap});
        ++stats_.feedback_delivered;
      } else {
        ++stats_.feedback_skipped;
      }
    }
  }
  if (room.next_tick >= room.total_ticks) end_session(room);
}

void Hub::on_signal(ConnectionId conn, const session::Signal& sig) {
  const auto& c = connections_.at(conn);
  if (!c.pid) return send_error(conn, codes::kNotJoined, "join a room before signalling");
  if (sig.from != c.pid->str()) {
    ++stats_.spoof_attempts;
    connections_.at(conn).flagged = true;
    return send_error(conn, codes::kSpoofed, "signal sender does not match the joined id");
  }
  if (sig.data.size() > cfg_.max_signal_bytes)
    return send_error(conn, codes::kPayloadTooLarge,
                      "signal payload of " + std::to_string(sig.data.size()) + " bytes exceeds " +
                          std::to_string(cfg_.max_signal_bytes));
  const Room& room = *rooms_.at(c.room);
  auto peer = sig.to.empty() ? room.members.end() : room.members.find(ParticipantId(sig.to));
  if (peer == room.members.end() || !peer->second.conn)
    return send_error(conn, codes::kUnknownPeer, "no connected peer " + sig.to + " in room " + room.id);
  send(*peer->second.conn, sig);
  ++stats_.signals_relayed;
  spdlog::debug("room {}: signal {} -> {} ({} bytes)", room.id, sig.from, sig.to, sig.data.size());
}

void Hub::on_leave(ConnectionId conn, const session::Leave& leave) {
  auto& c = connections_.at(conn);
  if (!c.pid) return send_error(conn, codes::kNotJoined, "not in a room");
  if (leave.pid != *c.pid) {
    ++stats_.spoof_attempts;
    c.flagged = true;
    return send_error(conn, codes::kSpoofed, "cannot leave on behalf of another participant");
  }
  Room& room = *rooms_.at(c.room);
  const ParticipantId pid = *c.pid;
  c.room.clear();
  c.pid.reset();
  remove_member(room, pid);
}

void Hub::remove_member(Room& room, const ParticipantId& pid) {
  room.members.erase(pid);
  for (auto& [tick, frames] : room.pending) frames.erase(pid);
  spdlog::info("room {}: {} left", room.id, pid.str());
  if (!room.started) {
    if (room.members.empty()) room.closed = true;  // nothing logged yet
    return;
  }
  room.recorder->leave(pid, room.next_tick);
  if (room.members.empty()) {
    end_session(room);
    return;
  }
  drain_complete_ticks(room);
}

void Hub::disconnect(ConnectionId conn, Millis now) {
  auto it = connections_.find(conn);
  if (it == connections_.end()) return;
  const std::string room_id = it->second.room;
  const auto pid = it->second.pid;
  connections_.erase(it);
  if (!pid) return;

  auto r = rooms_.find(room_id);
  if (r == rooms_.end()) return;
  Room& room = *r->second;
  if (!room.started) {
    remove_member(room, *pid);
  } else {
    // stays a member; its ticks are synthesized until it reconnects
    room.members.at(*pid).conn.reset();
    spdlog::info("room {}: {} disconnected", room.id, pid->str());
  }
  advance(now);
}

void Hub::advance(Millis now) {
  for (auto& [id, room] : rooms_) {
    if (!room->started || room->closed) continue;
    const auto elapsed = now - room->clock_origin;
    if (elapsed.count() < 0) continue;
    const Tick clock_tick = static_cast<Tick>(elapsed.count()) / cfg_.engine.tick_duration_ms;
    while (!room->closed && room->next_tick + cfg_.deadline_ticks <= clock_tick) process_tick(*room);
    drain_complete_ticks(*room);
  }
  sweep_closed_rooms();
}

void Hub::end_session(Room& room) {
  if (room.closed) return;
  room.closed = true;
  room.pending.clear();

  bool persisted = true;
  std::string failure;
  try {
    room.log->commit();
  } catch (const std::exception& e) {
    persisted = false;
    failure = e.what();
  }
  ++stats_.sessions_ended;
  if (persisted) {
    spdlog::info("room {}: session ended after {} ticks, log {}", room.id, room.next_tick, room.log_id);
  } else {
    ++stats_.persistence_failures;
    spdlog::error("room {}: could not persist log {}: {}", room.id, room.log_id, failure);
  }

  for (auto& [pid, member] : room.members) {
    if (!member.conn) continue;
    if (persisted) {
      send(*member.conn, session::SessionEnd{room.log_id});
    } else {
      send_error(*member.conn, codes::kPersistence, "session log not saved: " + failure);
    }
    auto& c = connections_.at(*member.conn);
    c.room.clear();
    c.pid.reset();
  }
}

void Hub::stop_room(const std::string& room_id) {
  auto it = rooms_.find(room_id);
  if (it == rooms_.end()) return;
  Room& room = *it->second;
  if (room.started) {
    end_session(room);
  } else {
    for (auto& [pid, member] : room.members) {
      if (!member.conn) continue;
      auto& c = connections_.at(*member.conn);
      c.room.clear();
      c.pid.reset();
    }
    room.closed = true;
  }
  sweep_closed_rooms();
}

void Hub::stop_all() {
  for (const auto& id : room_ids()) stop_room(id);
}

void Hub::sweep_closed_rooms() {
  std::erase_if(rooms_, [](const auto& kv) { return kv.second->closed; });
}

std::vector<std::string> Hub::room_ids() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : rooms_) out.push_back(id);
  return out;
}

std::optional<Tick> Hub::room_tick(const std::string& room_id) const {
  auto it = rooms_.find(room_id);
  if (it == rooms_.end() || !it->second->started) return std::nullopt;
  return it->second->next_tick;
}

bool Hub::connection_flagged(ConnectionId conn) const {
  auto it = connections_.find(conn);
  return it != connections_.end() && it->second.flagged;
}

}  // namespace groupfeed::server
