#include "groupfeed/session/messages.hpp"

#include "groupfeed/session/json_codec.hpp"
#include "json_fields.hpp"

namespace groupfeed::session {

using nlohmann::json;
using namespace detail;

std::string_view to_string(RoomMode mode) noexcept {
  return mode == RoomMode::Feedback ? "feedback" : "nofeedback";
}

std::optional<RoomMode> parse_room_mode(std::string_view s) noexcept {
  if (s == "feedback") return RoomMode::Feedback;
  if (s == "nofeedback") return RoomMode::NoFeedback;
  return std::nullopt;
}

namespace {

struct Encoder {
  json operator()(const Join& m) const {
    json j{{"t", "join"}, {"room", m.room}, {"pid", m.pid.str()}};
    if (m.mode) j["mode"] = to_string(*m.mode);
    return j;
  }
  json operator()(const JoinAck& m) const {
    json j{{"t", "ack"}, {"room", m.room}, {"pid", m.pid.str()}};
    put_engine_config(j, m.engine);
    j["mode"] = to_string(m.mode);
    j["max_members"] = m.max_members;
    return j;
  }
  json operator()(const Start& m) const {
    return json{{"t", "start"}, {"tick_ms", m.tick_ms}, {"ticks", m.ticks}};
  }
  json operator()(const Frame& m) const { return frame_to_json(m.frame); }
  json operator()(const Feedback& m) const { return snapshot_to_json(m.snapshot); }
  json operator()(const Signal& m) const {
    return json{{"t", "sig"}, {"from", m.from}, {"to", m.to}, {"data", m.data}};
  }
  json operator()(const Leave& m) const { return json{{"t", "leave"}, {"pid", m.pid.str()}}; }
  json operator()(const SessionEnd& m) const { return json{{"t", "end"}, {"log", m.log_id}}; }
  json operator()(const Error& m) const { return json{{"t", "err"}, {"code", m.code}, {"msg", m.msg}}; }
};

RoomMode required_mode(const json& j) {
  auto mode = parse_room_mode(required<std::string>(j, "mode"));
  if (!mode) throw ProtocolError("mode must be \"feedback\" or \"nofeedback\"");
  return *mode;
}

}  // namespace

std::string encode(const Message& msg) {
  // invalid UTF-8 in opaque payloads is replaced rather than aborting the send
  return std::visit(Encoder{}, msg).dump(-1, ' ', false, json::error_handler_t::replace);
}

Message decode(std::string_view line) {
  json j = json::parse(line.begin(), line.end(), nullptr, false);
  if (j.is_discarded()) throw ProtocolError("malformed JSON");
  if (!j.is_object()) throw ProtocolError("message must be a JSON object");
  const auto type = required<std::string>(j, "t");

  if (type == "join") {
    Join m{required<std::string>(j, "room"), required_pid(j, "pid"), std::nullopt};
    if (m.room.empty()) throw ProtocolError("room must not be empty");
    if (j.contains("mode")) m.mode = required_mode(j);
    return m;
  }
  if (type == "frame") return Frame{frame_from_json(j)};
  if (type == "fb") return Feedback{snapshot_from_json(j)};
  if (type == "sig")
    return Signal{required<std::string>(j, "from"), required<std::string>(j, "to"),
                  required<std::string>(j, "data")};
  if (type == "leave") return Leave{required_pid(j, "pid")};
  if (type == "end") return SessionEnd{required<std::string>(j, "log")};
  if (type == "err") return Error{required<std::string>(j, "code"), required<std::string>(j, "msg")};
  if (type == "ack") {
    JoinAck m{required<std::string>(j, "room"), required_pid(j, "pid"), engine_config_from_json(j),
              required_mode(j), 0};
    m.max_members = static_cast<std::uint32_t>(required_uint(j, "max_members"));
    return m;
  }
  if (type == "start") {
    return Start{static_cast<std::uint32_t>(required_uint(j, "tick_ms")), required_uint(j, "ticks")};
  }
  throw ProtocolError("unknown message type \"" + type + "\"");
}

}  // namespace groupfeed::session
