// Acceptance suite. Prints one PASS/FAIL line per criterion; failing checks are
// listed underneath. Exit status is non-zero if any selected criterion fails.

#include <fmt/format.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "groupfeed/analysis/replay.hpp"
#include "groupfeed/analysis/stats.hpp"
#include "groupfeed/analysis/synth.hpp"
#include "groupfeed/metrics/overlap.hpp"
#include "groupfeed/metrics/participation.hpp"
#include "groupfeed/metrics/zones.hpp"
#include "hub_harness.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace groupfeed;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Report {
  std::size_t checks = 0;
  std::vector<std::string> failures;
  std::vector<std::string> notes;

  void expect(bool ok, const std::string& what) {
    ++checks;
    if (!ok) failures.push_back(what);
  }
  void note(std::string s) { notes.push_back(std::move(s)); }
};

struct Options {
  fs::path workdir;
  std::string groupfeed_cli;  // optional path to the groupfeed binary
};

struct Criterion {
  std::string name;
  double budget_s;  // 0 = no runtime bound
  std::function<void(Report&, const Options&)> run;
};

session::SessionLog parse_text(const std::string& text) {
  std::istringstream in(text);
  return session::parse_session_log(in);
}

std::string synth_text(const json& spec, std::uint64_t seed = 1) {
  session::MemoryLogSink sink;
  analysis::synthesize(analysis::parse_synth_spec(spec), seed, sink);
  return sink.text();
}

// ---------------------------------------------------------------------------

void zones(Report& r, const Options&) {
  using metrics::EmotionZone;
  using metrics::LevelZone;
  using metrics::VolumeZone;
  const std::pair<double, LevelZone> part[] = {
      {19, LevelZone::Low}, {20, LevelZone::Mid}, {30, LevelZone::Mid}, {31, LevelZone::High}};
  const std::pair<double, EmotionZone> emo[] = {{44, EmotionZone::Negative},
                                                {45, EmotionZone::Neutral},
                                                {55, EmotionZone::Neutral},
                                                {56, EmotionZone::Positive}};
  const std::pair<double, VolumeZone> vol[] = {{1.0, VolumeZone::Silent}, {1.1, VolumeZone::Low},
                                               {7.0, VolumeZone::Low},    {7.1, VolumeZone::Mid},
                                               {20.0, VolumeZone::Mid},   {20.1, VolumeZone::High}};
  for (auto [x, z] : part) {
    const auto got = metrics::classify_participation(x);
    r.expect(got == z, fmt::format("participation {} -> {}, expected {}", x, metrics::to_string(got),
                                   metrics::to_string(z)));
  }
  for (auto [x, z] : emo) {
    const auto got = metrics::classify_emotion(x);
    r.expect(got == z,
             fmt::format("emotion {} -> {}, expected {}", x, metrics::to_string(got), metrics::to_string(z)));
  }
  for (auto [x, z] : vol) {
    const auto got = metrics::classify_volume(x);
    r.expect(got == z,
             fmt::format("volume {} -> {}, expected {}", x, metrics::to_string(got), metrics::to_string(z)));
  }
}

// ---------------------------------------------------------------------------

void interruptions(Report& r, const Options&) {
  // scripted overlaps: P1 talks 0-10 s, P2 joins for the last `overlap` seconds
  for (auto [overlap, expected] : {std::pair{2.9, 0}, std::pair{3.0, 1}, std::pair{10.0, 1}}) {
    const json spec{{"duration_s", 20},
                    {"participants",
                     {{{"pid", "P1"}, {"segments", {{{"from", 0}, {"to", 10}, {"spk", true}, {"vol", 10}}}}},
                      {{"pid", "P2"},
                       {"segments", {{{"from", 10 - overlap}, {"to", 10}, {"spk", true}, {"vol", 10}}}}}}}};
    const auto rows = analysis::summarize(analysis::replay(parse_text(synth_text(spec))).snapshots);
    for (const auto& row : rows)
      r.expect(row.interruptions == static_cast<std::uint64_t>(expected),
               fmt::format("{} s overlap: {} counted {}, expected {}", overlap, row.participant, row.interruptions,
                           expected));
  }
  {
    const json seg = {{{"from", 0}, {"to", 3}, {"spk", true}, {"vol", 10}}};
    const json spec{{"duration_s", 10},
                    {"participants",
                     {{{"pid", "A"}, {"segments", seg}},
                      {{"pid", "B"}, {"segments", seg}},
                      {{"pid", "C"}, {"segments", seg}}}}};
    const auto rows = analysis::summarize(analysis::replay(parse_text(synth_text(spec))).snapshots);
    for (const auto& row : rows)
      r.expect(row.interruptions == 2,
               fmt::format("three-way 3 s overlap: {} counted {}, expected 2", row.participant, row.interruptions));
  }

  // random patterns against maximal-run enumeration
  std::mt19937_64 rng(20240601);
  std::size_t mismatched = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 6)(rng);
    const std::size_t ticks = std::uniform_int_distribution<std::size_t>(200, 1200)(rng);
    const std::uint32_t threshold = std::uniform_int_distribution<std::uint32_t>(1, 40)(rng);
    testing::History history(n);
    for (auto& h : history)
      h = testing::markov_speech(rng, ticks, std::uniform_real_distribution(0.01, 0.2)(rng),
                                 std::uniform_real_distribution(0.005, 0.1)(rng));
    const auto expected = testing::enumerate_interruptions(history, threshold);

    metrics::OverlapTracker tracker(threshold);
    std::vector<metrics::ParticipantId> ids;
    for (std::size_t p = 0; p < n; ++p) {
      ids.emplace_back("p" + std::to_string(p));
      tracker.add_participant(ids.back());
    }
    bool ok = true;
    std::vector<metrics::FeatureFrame> frames(n);
    for (std::size_t t = 0; t < ticks && ok; ++t) {
      for (std::size_t p = 0; p < n; ++p) frames[p] = {ids[p], t, history[p][t] != 0, 10.0, 0.0};
      tracker.update(frames);
      for (std::size_t p = 0; p < n; ++p) ok = ok && tracker.count(ids[p]) == expected[t][p];
    }
    if (!ok && ++mismatched <= 3)
      r.expect(false, fmt::format("trial {} (n={}, ticks={}, threshold={}) disagrees with the oracle", trial, n,
                                  ticks, threshold));
  }
  r.expect(mismatched == 0, fmt::format("{} of 1000 random patterns disagree", mismatched));
}

// ---------------------------------------------------------------------------

void participation(Report& r, const Options&) {
  constexpr std::size_t kTicks = 9000;  // 15 min at 100 ms
  constexpr std::size_t kWindow = 2400;  // 240 s
  std::mt19937_64 rng(7);
  std::size_t compared = 0, mismatched = 0;
  for (int session = 0; session < 100; ++session) {
    for (int p = 0; p < 4; ++p) {
      const auto flags = testing::markov_speech(rng, kTicks, std::uniform_real_distribution(0.002, 0.1)(rng),
                                                std::uniform_real_distribution(0.005, 0.1)(rng));
      metrics::ParticipationWindow window(kWindow);
      const metrics::ParticipantId id("p");
      for (std::size_t t = 0; t < kTicks; ++t) {
        const double got = window.update({id, t, flags[t] != 0, 0.0, 0.0});
        const double want = testing::recount_participation(flags, t, kWindow);
        ++compared;
        if (got != want && ++mismatched <= 3)
          r.expect(false, fmt::format("session {} participant {} tick {}: {} vs recount {}", session, p, t, got, want));
      }
    }
  }
  r.expect(mismatched == 0, fmt::format("{} of {} prefixes differ from the recount", mismatched, compared));
  r.note(fmt::format("{} prefixes compared", compared));
}

// ---------------------------------------------------------------------------

void statistics(Report& r, const Options&) {
  struct Anchor {
    double f;
    int df1, df2;
    const char* printed;
  };
  for (const Anchor& a : {Anchor{4.73, 1, 76, "0.03"}, Anchor{6.53, 1, 76, "0.013"}, Anchor{6.69, 1, 38, "0.014"},
                          Anchor{5.054, 1, 38, "0.03"}, Anchor{4.937, 1, 38, "0.033"}}) {
    const std::string printed = a.printed;
    const int decimals = static_cast<int>(printed.size() - printed.find('.') - 1);
    const double p = analysis::pvalue_from_f(a.f, a.df1, a.df2);
    const std::string got = fmt::format("{:.{}f}", p, decimals);
    r.expect(got == printed, fmt::format("p(F({},{})={}) = {:.6f} prints as {}, expected {}", a.df1, a.df2, a.f, p,
                                         got, printed));
  }

  // cells (condition, session): c-s1 {3,5,4}, c-s2 {6,8,7}, t-s1 {4,6,5}, t-s2 {10,12,11}
  // grand mean 6.75; condition means 5.5 / 8; session means 4.5 / 9; cell means 4, 7, 5, 11
  //   SS_condition   = 6 * ((5.5-6.75)^2 + (8-6.75)^2)            = 18.75
  //   SS_session     = 6 * ((4.5-6.75)^2 + (9-6.75)^2)            = 60.75
  //   SS_interaction = 3 * sum (cell - row - col + grand)^2       = 6.75
  //   SS_within      = 4 cells * 2                                = 8
  //   SS_total       = 94.25
  using analysis::Condition;
  using analysis::SessionIndex;
  std::vector<analysis::CellSample> samples;
  auto add = [&](Condition c, SessionIndex s, std::initializer_list<double> xs) {
    for (double x : xs) samples.push_back({c, s, "p" + std::to_string(samples.size()), x});
  };
  add(Condition::Control, SessionIndex::First, {3, 5, 4});
  add(Condition::Control, SessionIndex::Second, {6, 8, 7});
  add(Condition::Treatment, SessionIndex::First, {4, 6, 5});
  add(Condition::Treatment, SessionIndex::Second, {10, 12, 11});
  const auto t = analysis::anova2x2(samples);
  auto close = [&](const char* what, double got, double want) {
    r.expect(std::fabs(got - want) <= 1e-9, fmt::format("{} = {:.12g}, expected {}", what, got, want));
  };
  close("SS condition", t.condition.ss, 18.75);
  close("SS session", t.session.ss, 60.75);
  close("SS interaction", t.interaction.ss, 6.75);
  close("SS within", t.ss_within, 8.0);
  close("SS total", t.ss_total, 94.25);
  close("df within", t.df_within, 8.0);
  close("F condition", t.condition.f, 18.75);
  close("F session", t.session.f, 60.75);
  close("F interaction", t.interaction.f, 6.75);
}

// ---------------------------------------------------------------------------

// Four participants, 15 minutes, Markov speaking with per-run volume and valence.
json e2e_spec() {
  std::mt19937_64 rng(4242);
  json participants = json::array();
  for (int p = 0; p < 4; ++p) {
    const auto flags = testing::markov_speech(rng, 9000, 0.01, 0.03);
    json segs = json::array();
    std::size_t t = 0;
    while (t < flags.size()) {
      std::size_t end = t;
      while (end < flags.size() && flags[end] == flags[t]) ++end;
      const bool spk = flags[t] != 0;
      segs.push_back({{"from", t / 10.0},
                      {"to", end / 10.0},
                      {"spk", spk},
                      {"vol", spk ? std::uniform_real_distribution(2.0, 30.0)(rng) : 0.5},
                      {"val", std::uniform_real_distribution(-60.0, 60.0)(rng)}});
      t = end;
    }
    participants.push_back({{"pid", fmt::format("P{}", p + 1)}, {"segments", segs}});
  }
  return {{"room", "e2e"},
          {"duration_s", 900},
          {"jitter", {{"volume", 2.0}, {"valence", 15.0}}},
          {"participants", participants}};
}

struct E2ERun {
  std::string log_id;
  fs::path log_path;
  std::vector<std::string> fb_lines;
  std::vector<std::string> frame_lines;
  session::LogHeader header;
  std::size_t feedback_received = 0;
  std::size_t feedback_misrouted = 0;
  std::uint64_t hub_feedback_delivered = 0;
  bool ended = false;
};

E2ERun run_e2e(const std::vector<std::vector<metrics::FeatureFrame>>& frames, session::RoomMode mode,
               const fs::path& dir) {
  server::ServerConfig cfg;
  cfg.max_members = 4;
  cfg.session_duration_s = 900;
  auto store = std::make_shared<server::FileLogStore>(dir);
  testing::HubHarness h(cfg, store);
  std::vector<testing::FakeClient*> clients;
  for (const auto& f : frames[0]) clients.push_back(&h.join("e2e", f.participant.str(), mode));

  // frames arrive in a shuffled order each tick; some are held back one tick
  // (still inside the deadline)
  std::mt19937_64 rng(99);
  std::vector<std::pair<std::size_t, metrics::FeatureFrame>> held;
  for (std::size_t t = 0; t < frames.size(); ++t) {
    std::vector<std::size_t> order(frames[t].size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    auto late = std::move(held);
    held.clear();
    for (std::size_t i : order) {
      if (std::bernoulli_distribution(0.05)(rng)) {
        held.emplace_back(i, frames[t][i]);
        continue;
      }
      h.send(*clients[i], session::Frame{frames[t][i]});
    }
    for (auto& [i, f] : late) h.send(*clients[i], session::Frame{f});
    h.advance_to(server::Millis(static_cast<std::int64_t>(t + 1) * 100));
  }
  for (auto& [i, f] : held) h.send(*clients[i], session::Frame{f});
  h.advance_by(server::Millis(1000));

  E2ERun run;
  for (std::size_t i = 0; i < clients.size(); ++i) {
    for (const auto& fb : clients[i]->all<session::Feedback>()) {
      ++run.feedback_received;
      if (fb.snapshot.participant != frames[0][i].participant) ++run.feedback_misrouted;
    }
  }
  run.hub_feedback_delivered = h.hub().stats().feedback_delivered;
  const auto ends = clients[0]->all<session::SessionEnd>();
  if (ends.size() != 1) return run;
  run.ended = true;
  run.log_id = ends[0].log_id;
  run.log_path = dir / run.log_id;
  const auto log = session::read_session_log(run.log_path);
  run.header = log.header;
  for (const auto& rec : log.records) {
    if (std::holds_alternative<metrics::FeedbackSnapshot>(rec.record)) run.fb_lines.push_back(rec.text);
    if (std::holds_alternative<metrics::FeatureFrame>(rec.record)) run.frame_lines.push_back(rec.text);
  }
  return run;
}

// Runs `cli replay <log>`; returns exit status and output.
std::pair<int, std::string> run_cli_replay(const std::string& cli, const fs::path& log) {
  const std::string cmd = fmt::format("\"{}\" replay \"{}\" 2>&1", cli, log.string());
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, "popen failed"};
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) out += buf;
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

void determinism(Report& r, const Options& opt) {
  const auto spec = analysis::parse_synth_spec(e2e_spec());
  const auto frames = analysis::script_frames(spec, 1);
  const fs::path dir = opt.workdir / "e2e";
  fs::remove_all(dir);

  const auto fb = run_e2e(frames, session::RoomMode::Feedback, dir / "feedback");
  const auto nofb = run_e2e(frames, session::RoomMode::NoFeedback, dir / "nofeedback");
  r.expect(fb.ended, "feedback run did not end with a committed log");
  r.expect(nofb.ended, "nofeedback run did not end with a committed log");
  if (!fb.ended || !nofb.ended) return;

  const auto replayed = analysis::replay_file(fb.log_path);
  r.expect(replayed.ticks == 9000, fmt::format("replayed {} ticks, expected 9000", replayed.ticks));
  r.expect(replayed.snapshots.size() == 3600,
           fmt::format("replayed {} snapshots, expected 3600", replayed.snapshots.size()));
  r.expect(replayed.divergences.empty(), fmt::format("{} divergences in replay", replayed.divergences.size()));
  const auto replayed_nofb = analysis::replay_file(nofb.log_path);
  r.expect(replayed_nofb.divergences.empty(),
           fmt::format("{} divergences replaying the nofeedback log", replayed_nofb.divergences.size()));

  if (!opt.groupfeed_cli.empty()) {
    const auto [status, out] = run_cli_replay(opt.groupfeed_cli, fb.log_path);
    r.expect(status == 0 && out.find(" 0 divergences") != std::string::npos,
             fmt::format("groupfeed replay exited {}: {}", status, out));
  } else {
    r.note("groupfeed binary not given; replay checked through the library only");
  }

  r.expect(fb.feedback_received == 3600, fmt::format("feedback run delivered {} snapshots, expected 3600",
                                                     fb.feedback_received));
  r.expect(fb.feedback_misrouted == 0, fmt::format("{} snapshots reached a non-subject", fb.feedback_misrouted));
  r.expect(nofb.feedback_received == 0 && nofb.hub_feedback_delivered == 0,
           fmt::format("nofeedback run delivered {} feedback messages", nofb.feedback_received));
  r.expect(fb.frame_lines == nofb.frame_lines, "logged frames differ between modes");
  r.expect(fb.fb_lines == nofb.fb_lines, "logged snapshot streams differ between modes");
  r.expect(fb.header.mode == session::RoomMode::Feedback && nofb.header.mode == session::RoomMode::NoFeedback,
           "log headers do not record the mode");
  r.note(fmt::format("{} snapshot lines per log", fb.fb_lines.size()));
  fs::remove_all(dir);
}

// ---------------------------------------------------------------------------

void privacy(Report& r, const Options&) {
  server::ServerConfig cfg;
  cfg.max_members = 4;
  cfg.session_duration_s = 120;
  testing::HubHarness h(cfg);
  auto* store = h.memory_store();
  std::mt19937_64 rng(31337);
  auto chance = [&](double p) { return std::bernoulli_distribution(p)(rng); };

  struct Seat {
    std::string pid;
    testing::FakeClient* client = nullptr;  // null while disconnected
  };
  struct RoomRun {
    std::string id;
    session::RoomMode mode;
    std::vector<Seat> seats;
    std::vector<testing::FakeClient*> all_clients;  // everything that ever joined as a member
    std::string log_id;
  };
  struct Observer {
    testing::FakeClient* client;
    std::string room;
  };

  std::size_t routed = 0, feedback = 0, violations = 0, dropped_frames = 0, disconnects = 0, reconnects = 0,
              spoofs = 0, intruders = 0;
  std::vector<std::string> examples;
  auto violation = [&](std::string what) {
    ++violations;
    if (examples.size() < 3) examples.push_back(std::move(what));
  };

  const std::int64_t ticks = 1200;
  int round = 0;
  while (feedback < 10000 && round < 50) {
    const std::int64_t origin = h.now().count() + 1000;
    h.advance_to(server::Millis(origin));
    std::vector<RoomRun> rooms;
    std::vector<Observer> observers;
    for (int k = 0; k < 3; ++k) {
      RoomRun room{fmt::format("room{}", k), k == 2 ? session::RoomMode::NoFeedback : session::RoomMode::Feedback,
                   {}, {}, {}};
      // the same participant ids in every room
      for (int p = 0; p < 4; ++p) {
        Seat s{fmt::format("P{}", p + 1), &h.join(room.id, fmt::format("P{}", p + 1), room.mode)};
        room.all_clients.push_back(s.client);
        room.seats.push_back(s);
      }
      rooms.push_back(std::move(room));
    }

    for (std::int64_t t = 0; t < ticks; ++t) {
      for (auto& room : rooms) {
        for (auto& seat : room.seats) {
          if (!seat.client) {
            if (chance(0.05)) {
              seat.client = &h.join(room.id, seat.pid, room.mode);
              room.all_clients.push_back(seat.client);
              ++reconnects;
            }
            continue;
          }
          if (chance(0.002)) {
            h.drop(*seat.client);
            seat.client = nullptr;
            ++disconnects;
            continue;
          }
          if (chance(0.001)) {
            const auto& other = room.seats[std::uniform_int_distribution<std::size_t>(0, 3)(rng)].pid;
            h.frame(*seat.client, other, static_cast<metrics::Tick>(t), true);
            ++spoofs;
          }
          if (chance(0.05)) {
            ++dropped_frames;
            continue;
          }
          h.frame(*seat.client, seat.pid, static_cast<metrics::Tick>(t), chance(0.3),
                  std::uniform_real_distribution(0.0, 30.0)(rng), std::uniform_real_distribution(-80.0, 80.0)(rng));
        }
        if (chance(0.0005)) {
          // someone tries to take over an occupied id
          auto& c = h.join(room.id, room.seats[0].pid, room.mode);
          observers.push_back({&c, room.id});
          ++intruders;
        }
      }
      h.advance_to(server::Millis(origin + (t + 1) * 100));
    }
    h.advance_by(server::Millis(1000));

    for (auto& room : rooms) {
      for (auto* c : room.all_clients) {
        for (const auto& e : c->all<session::SessionEnd>()) room.log_id = e.log_id;
        if (!room.log_id.empty()) break;
      }
      const std::string* text = room.log_id.empty() ? nullptr : store->find(room.log_id);
      if (!text) {
        violation(fmt::format("round {} {}: no committed log", round, room.id));
        continue;
      }
      std::set<std::string> logged;
      for (const auto& rec : parse_text(*text).records)
        if (std::holds_alternative<metrics::FeedbackSnapshot>(rec.record)) logged.insert(rec.text);

      for (auto* c : room.all_clients) {
        const auto acks = c->all<session::JoinAck>();
        const std::string pid = acks.empty() ? std::string() : acks[0].pid.str();
        routed += c->inbox.size();
        for (const auto& fb : c->all<session::Feedback>()) {
          ++feedback;
          if (room.mode == session::RoomMode::NoFeedback)
            violation(fmt::format("{} received feedback in a nofeedback room", pid));
          else if (fb.snapshot.participant.str() != pid)
            violation(fmt::format("{} received {}'s feedback", pid, fb.snapshot.participant.str()));
          else if (!logged.contains(session::encode(fb)))
            violation(fmt::format("{} received a snapshot that is not in its own room's log", pid));
        }
        c->inbox.clear();
      }
    }
    for (auto& o : observers) {
      routed += o.client->inbox.size();
      if (o.client->count<session::Feedback>() > 0) violation("a rejected joiner received feedback");
      o.client->inbox.clear();
    }
    ++round;
  }

  r.expect(violations == 0, fmt::format("{} privacy violations: {}", violations, fmt::join(examples, "; ")));
  r.expect(routed >= 10000, fmt::format("only {} messages routed", routed));
  r.expect(feedback >= 10000, fmt::format("only {} feedback messages routed", feedback));
  r.expect(dropped_frames > 0 && disconnects > 0 && reconnects > 0, "fault injection did not fire");
  r.note(fmt::format("{} rounds, {} messages routed ({} feedback); faults: {} dropped frames, {} disconnects, "
                     "{} reconnects, {} spoofed frames, {} id takeovers",
                     round, routed, feedback, dropped_frames, disconnects, reconnects, spoofs, intruders));
}

// ---------------------------------------------------------------------------

// A participant who talks for the first E seconds and is silent afterwards.
// With a 240 s window (2400 ticks), the snapshot after tick k = 10m + 9 holds
// 10E - (k - 2399) speaking ticks once k > 2399; it is Low (< 480 ticks) iff
// m > E + 191, so the session has 708 - E Low snapshots out of 900.
void occupancy(Report& r, const Options&) {
  for (double target : {43.24, 16.72}) {
    const auto low_snapshots = static_cast<int>(std::lround(target * 9.0));
    const int e = 708 - low_snapshots;
    const json spec{{"duration_s", 900},
                    {"participants", {{{"pid", "T"}, {"segments", {{{"from", 0}, {"to", e}, {"spk", true},
                                                                      {"vol", 10}}}}}}}};
    const auto text = synth_text(spec);
    const auto replayed = analysis::replay(parse_text(text));
    const auto rows = analysis::summarize(replayed.snapshots);
    const double quantum = 100.0 / 900.0;
    const double got = rows.at(0).participation[0];
    r.expect(std::fabs(got - target) <= quantum + 1e-12,
             fmt::format("scripted low-participation {:.2f}%: summarize gives {:.4f}% (quantum {:.4f})", target, got,
                         quantum));

    // independent recount from the scripted flags
    std::vector<std::uint8_t> flags(9000);
    for (int t = 0; t < 10 * e; ++t) flags[static_cast<std::size_t>(t)] = 1;
    int low = 0;
    for (std::size_t k = 9; k < 9000; k += 10) low += testing::recount_participation(flags, k, 2400) < 20.0;
    r.expect(low == low_snapshots, fmt::format("recount finds {} low snapshots, construction expects {}", low,
                                               low_snapshots));
    r.note(fmt::format("target {:.2f}% -> speak 0-{} s -> {:.4f}%", target, e, got));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"groupfeed acceptance suite"};
  std::vector<std::string> only;
  Options opt;
  opt.workdir = fs::temp_directory_path() / "groupfeed-acceptance";
  bool verbose = false;
  app.add_option("--only", only, "criteria to run (default: all)");
  app.add_option("--groupfeed", opt.groupfeed_cli, "path to the groupfeed CLI, used to replay the end-to-end log");
  app.add_option("--workdir", opt.workdir, "scratch directory");
  app.add_flag("-v,--verbose", verbose, "print notes for passing criteria");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {"zones", 1.0, zones},
      {"interruptions", 10.0, interruptions},
      {"participation", 60.0, participation},
      {"statistics", 1.0, statistics},
      {"determinism", 120.0, determinism},
      {"privacy", 0.0, privacy},
      {"occupancy", 0.0, occupancy},
  };
  for (const auto& name : only) {
    if (std::none_of(criteria.begin(), criteria.end(), [&](const auto& c) { return c.name == name; })) {
      std::cerr << "unknown criterion " << name << '\n';
      return 2;
    }
  }

  spdlog::set_level(spdlog::level::err);
  fs::create_directories(opt.workdir);
  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.name) == only.end()) continue;
    Report report;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(report, opt);
    } catch (const std::exception& e) {
      report.expect(false, fmt::format("threw: {}", e.what()));
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0 && secs >= c.budget_s)
      report.expect(false, fmt::format("took {:.2f} s, budget {:.0f} s", secs, c.budget_s));
    const bool ok = report.failures.empty();
    failed += !ok;
    const std::string budget = c.budget_s > 0 ? fmt::format(" (limit {:.0f} s)", c.budget_s) : std::string();
    std::cout << fmt::format("{} {:<14} {:>7.2f} s{}  {}/{} checks\n", ok ? "PASS" : "FAIL", c.name, secs, budget,
                             report.checks - report.failures.size(), report.checks);
    for (const auto& f : report.failures) std::cout << "     - " << f << '\n';
    if (verbose || !ok)
      for (const auto& n : report.notes) std::cout << "     . " << n << '\n';
  }
  std::cout.flush();
  return failed == 0 ? 0 : 1;
}
