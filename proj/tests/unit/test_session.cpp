#include <random>
#include <sstream>

#include "doctest.h"
#include "groupfeed/session/messages.hpp"
#include "groupfeed/session/session_log.hpp"
#include "json.hpp"

using namespace groupfeed;
using namespace groupfeed::session;
using metrics::ParticipantId;

TEST_CASE("wire field names are exact") {
  metrics::FeedbackSnapshot s;
  s.participant = ParticipantId("alice");
  s.tick = 42;
  s.participation_pct = 25.0;
  s.participation_zone = metrics::LevelZone::Mid;
  s.interruption_count = 3;
  s.volume_zone = metrics::VolumeZone::Silent;
  s.volume_smoothed = 0.0;
  s.emotion_score = 44.0;
  s.emotion_zone = metrics::EmotionZone::Negative;
  const auto j = nlohmann::json::parse(encode(Feedback{s}));
  CHECK(j == nlohmann::json::parse(
                 R"({"t":"fb","pid":"alice","tick":42,"part_pct":25.0,"part_zone":"mid","intr":3,)"
                 R"("vol_zone":"silent","emo":44.0,"emo_zone":"neg"})"));

  const auto f = nlohmann::json::parse(encode(Frame{{ParticipantId("bob"), 7, true, 12.5, -3.0}}));
  CHECK(f == nlohmann::json::parse(R"({"t":"frame","pid":"bob","tick":7,"spk":true,"vol":12.5,"val":-3.0})"));
  CHECK(nlohmann::json::parse(encode(Join{"r1", ParticipantId("p"), std::nullopt})) ==
        nlohmann::json::parse(R"({"t":"join","room":"r1","pid":"p"})"));
  CHECK(nlohmann::json::parse(encode(Signal{"a", "b", "xyz"})) ==
        nlohmann::json::parse(R"({"t":"sig","from":"a","to":"b","data":"xyz"})"));
  CHECK(nlohmann::json::parse(encode(SessionEnd{"log-1"})) == nlohmann::json::parse(R"({"t":"end","log":"log-1"})"));
  CHECK(nlohmann::json::parse(encode(Error{"RoomFull", "full"})) ==
        nlohmann::json::parse(R"({"t":"err","code":"RoomFull","msg":"full"})"));
}

TEST_CASE("decode round-trips random messages") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> vol(0.0, 100.0), val(-100.0, 100.0);
  for (int i = 0; i < 500; ++i) {
    const ParticipantId pid("p" + std::to_string(rng() % 1000));
    const metrics::FeatureFrame frame{pid, rng() % 100000, rng() % 2 == 0, vol(rng), val(rng)};
    metrics::FeedbackSnapshot snap;
    snap.participant = pid;
    snap.tick = rng() % 100000;
    snap.participation_pct = vol(rng);
    snap.participation_zone = static_cast<metrics::LevelZone>(rng() % 3);
    snap.interruption_count = rng() % 50;
    snap.volume_zone = static_cast<metrics::VolumeZone>(rng() % 4);
    snap.emotion_score = vol(rng);
    snap.emotion_zone = static_cast<metrics::EmotionZone>(rng() % 3);

    for (const Message& m : {Message{Frame{frame}}, Message{Feedback{snap}},
                             Message{Join{"room" + std::to_string(i), pid, RoomMode::NoFeedback}},
                             Message{Leave{pid}}, Message{Start{100, 9000}}}) {
      const auto line = encode(m);
      CHECK(line.find('\n') == std::string::npos);
      CHECK(encode(decode(line)) == line);
    }
    CHECK(std::get<Frame>(decode(encode(Frame{frame}))).frame == frame);
  }
  JoinAck ack{"r", ParticipantId("p"), {}, RoomMode::Feedback, 4};
  ack.engine.zones.interruption_threshold_s = 1.7;
  const auto back = std::get<JoinAck>(decode(encode(ack)));
  CHECK(back.engine == ack.engine);
  CHECK(back.max_members == 4);
}

TEST_CASE("decode rejects malformed input") {
  CHECK_THROWS_AS(decode("not json"), ProtocolError);
  CHECK_THROWS_AS(decode("[1,2]"), ProtocolError);
  CHECK_THROWS_AS(decode(R"({"t":"dance"})"), ProtocolError);
  CHECK_THROWS_AS(decode(R"({"t":"frame","pid":"a","tick":-1,"spk":true,"vol":1,"val":0})"), ProtocolError);
  CHECK_THROWS_AS(decode(R"({"t":"frame","pid":"a","tick":1,"spk":"yes","vol":1,"val":0})"), ProtocolError);
  CHECK_THROWS_AS(decode(R"({"t":"frame","pid":"","tick":1,"spk":true,"vol":1,"val":0})"), ProtocolError);
  CHECK_THROWS_AS(decode(R"({"t":"frame","pid":"a","tick":1,"spk":true,"val":0})"), ProtocolError);
  CHECK_THROWS_AS(decode(R"({"t":"join","room":"r","pid":"a","mode":"loud"})"), ProtocolError);
  CHECK_THROWS_AS(decode(R"({"t":"fb","pid":"a","tick":1,"part_pct":1,"part_zone":"meh","intr":0,"vol_zone":"low","emo":50,"emo_zone":"neu"})"),
                  ProtocolError);
  // integers are accepted where numbers are expected
  const auto f = std::get<Frame>(decode(R"({"t":"frame","pid":"a","tick":3,"spk":false,"vol":10,"val":-5})"));
  CHECK(f.frame.volume == 10.0);
}

TEST_CASE("recorder logs frames every tick and snapshots on emission ticks") {
  MemoryLogSink sink;
  LogHeader h;
  h.room = "r";
  h.members = {ParticipantId("b"), ParticipantId("a")};
  h.emit_every_ticks = 5;
  h.ticks = 20;
  SessionRecorder rec(h, sink);
  for (metrics::Tick t = 0; t < 10; ++t) {
    std::vector<metrics::FeatureFrame> frames{{ParticipantId("b"), t, true, 5, 0}, {ParticipantId("a"), t, false, 0, 0}};
    const auto r = rec.step(t, frames);
    CHECK(r.emitted == (t == 4 || t == 9));
    CHECK(r.snapshots.size() == 2);
  }
  // header + 20 frames + 4 snapshots
  REQUIRE(sink.lines().size() == 25);
  CHECK(sink.lines()[1].find(R"("pid":"a")") != std::string::npos);  // participant order
  std::istringstream in(sink.text());
  const auto log = parse_session_log(in);
  CHECK(log.header == rec.header());
  CHECK(log.records.size() == 24);
  CHECK(log.records.front().line == 2);
}

TEST_CASE("log parse errors carry line numbers") {
  MemoryLogSink sink;
  SessionRecorder rec(LogHeader{}, sink);
  std::string text = sink.text() + "{\"t\":\"frame\",\"pid\":\"a\"}\n";
  std::istringstream in(text);
  try {
    parse_session_log(in);
    FAIL("expected LogParseError");
  } catch (const LogParseError& e) {
    CHECK(e.line() == 2);
  }
  std::istringstream empty("");
  CHECK_THROWS_AS(parse_session_log(empty), LogParseError);

  auto header = nlohmann::json::parse(sink.lines()[0]);
  header["v"] = 99;
  std::istringstream future(header.dump() + "\n");
  CHECK_THROWS_AS(parse_session_log(future), ConfigMismatch);
  header["v"] = kLogVersion;
  header["tick_ms"] = 5;
  std::istringstream bad_tick(header.dump() + "\n");
  CHECK_THROWS_AS(parse_session_log(bad_tick), ConfigMismatch);
}
