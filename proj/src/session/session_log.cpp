#include "groupfeed/session/session_log.hpp"

#include <algorithm>
#include <fstream>
#include <istream>

#include "groupfeed/session/json_codec.hpp"
#include "json_fields.hpp"

namespace groupfeed::session {

using nlohmann::json;
using namespace detail;

LogParseError::LogParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

std::string MemoryLogSink::text() const {
  std::string out;
  for (const auto& l : lines_) {
    out += l;
    out += '\n';
  }
  return out;
}

std::string encode_header(const LogHeader& h) {
  json j{{"t", "hdr"}, {"v", kLogVersion}, {"room", h.room}, {"start_ms", h.start_ms}};
  put_engine_config(j, h.engine);
  j["mode"] = to_string(h.mode);
  json members = json::array();
  for (const auto& m : h.members) members.push_back(m.str());
  j["members"] = std::move(members);
  j["emit_ticks"] = h.emit_every_ticks;
  j["ticks"] = h.ticks;
  return j.dump();
}

namespace {

struct RecordEncoder {
  json operator()(const metrics::FeatureFrame& f) const { return frame_to_json(f); }
  json operator()(const metrics::FeedbackSnapshot& s) const { return snapshot_to_json(s); }
  json operator()(const MemberEvent& e) const {
    return json{{"t", e.kind == MemberEvent::Kind::Join ? "join" : "leave"},
                {"pid", e.pid.str()},
                {"tick", e.tick}};
  }
};

LogHeader parse_header(const json& j) {
  if (required<std::string>(j, "t") != "hdr") throw ProtocolError("first record must be the header");
  const auto version = required<int>(j, "v");
  if (version != kLogVersion)
    throw ConfigMismatch("unsupported log version " + std::to_string(version));
  LogHeader h;
  h.room = required<std::string>(j, "room");
  h.start_ms = required<std::int64_t>(j, "start_ms");
  try {
    h.engine = engine_config_from_json(j);
  } catch (const ProtocolError& e) {
    throw ConfigMismatch(std::string("header engine configuration rejected: ") + e.what());
  }
  auto mode = parse_room_mode(required<std::string>(j, "mode"));
  if (!mode) throw ProtocolError("bad mode");
  h.mode = *mode;
  for (const auto& m : required<std::vector<std::string>>(j, "members")) {
    if (m.empty()) throw ProtocolError("empty member id");
    h.members.emplace_back(m);
  }
  h.emit_every_ticks = static_cast<std::uint32_t>(required_uint(j, "emit_ticks"));
  if (h.emit_every_ticks == 0) throw ConfigMismatch("emit_ticks must be positive");
  h.ticks = required_uint(j, "ticks");
  return h;
}

LogRecord parse_record(const json& j) {
  const auto type = required<std::string>(j, "t");
  if (type == "frame") return frame_from_json(j);
  if (type == "fb") return snapshot_from_json(j);
  if (type == "join" || type == "leave") {
    return MemberEvent{type == "join" ? MemberEvent::Kind::Join : MemberEvent::Kind::Leave,
                       required_uint(j, "tick"), required_pid(j, "pid")};
  }
  throw ProtocolError("unexpected record type \"" + type + "\"");
}

}  // namespace

std::string encode_record(const LogRecord& record) { return std::visit(RecordEncoder{}, record).dump(); }

SessionLog parse_session_log(std::istream& in) {
  SessionLog log;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw LogParseError(line_no, "malformed JSON");
    try {
      if (!have_header) {
        log.header = parse_header(j);
        have_header = true;
      } else {
        log.records.push_back(LoggedRecord{line_no, parse_record(j), line});
      }
    } catch (const ProtocolError& e) {
      throw LogParseError(line_no, e.what());
    } catch (const std::invalid_argument& e) {
      throw LogParseError(line_no, e.what());
    }
  }
  if (!have_header) throw LogParseError(line_no, "log has no header");
  return log;
}

SessionLog read_session_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_session_log(in);
}

SessionRecorder::SessionRecorder(LogHeader header, LogSink& sink)
    : header_(std::move(header)), sink_(sink), room_(header_.engine) {
  if (header_.emit_every_ticks == 0) throw std::invalid_argument("emit_every_ticks must be positive");
  for (const auto& m : header_.members) room_.add_participant(m);
  sink_.append(encode_header(header_));
}

void SessionRecorder::join(const metrics::ParticipantId& pid, metrics::Tick effective_tick) {
  room_.add_participant(pid);
  sink_.append(encode_record(MemberEvent{MemberEvent::Kind::Join, effective_tick, pid}));
}

void SessionRecorder::leave(const metrics::ParticipantId& pid, metrics::Tick effective_tick) {
  room_.remove_participant(pid);
  sink_.append(encode_record(MemberEvent{MemberEvent::Kind::Leave, effective_tick, pid}));
}

SessionRecorder::StepResult SessionRecorder::step(metrics::Tick tick,
                                                  std::span<const metrics::FeatureFrame> frames) {
  StepResult result;
  result.snapshots = room_.step(tick, frames);

  std::vector<const metrics::FeatureFrame*> ordered;
  ordered.reserve(frames.size());
  for (const auto& f : frames) ordered.push_back(&f);
  std::sort(ordered.begin(), ordered.end(),
            [](const auto* a, const auto* b) { return a->participant < b->participant; });
  for (const auto* f : ordered) sink_.append(encode_record(*f));

  result.emitted = is_emit_tick(tick, header_.emit_every_ticks);
  if (result.emitted)
    for (const auto& s : result.snapshots) sink_.append(encode_record(s));
  return result;
}

}  // namespace groupfeed::session
