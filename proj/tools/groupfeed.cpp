#include <fmt/format.h>

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "groupfeed/analysis/replay.hpp"
#include "groupfeed/analysis/stats.hpp"
#include "groupfeed/analysis/synth.hpp"
#include "json.hpp"

using namespace groupfeed;

namespace {

int run_replay(const std::string& path, std::size_t max_shown) {
  const auto r = analysis::replay_file(path);
  std::size_t shown = 0;
  for (const auto& d : r.divergences) {
    if (shown++ == max_shown) {
      std::cout << "...\n";
      break;
    }
    std::cout << fmt::format("divergence tick={} pid={} line={}\n  expected: {}\n  logged:   {}\n", d.tick,
                             d.participant, d.line, d.expected.empty() ? "(none)" : d.expected,
                             d.logged.empty() ? "(none)" : d.logged);
  }
  std::cout << fmt::format("{}: {} ticks, {} snapshots, {} divergences\n", path, r.ticks, r.snapshots.size(),
                           r.divergences.size());
  return r.divergences.empty() ? 0 : 1;
}

int run_summarize(const std::string& path, const std::string& csv_path) {
  const auto r = analysis::replay_file(path);
  const auto rows = analysis::summarize(r.snapshots);
  if (!csv_path.empty()) {
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("cannot write " + csv_path);
    analysis::write_occupancy_csv(out, rows);
  }
  std::cout << fmt::format("{:<12} {:>5}  {:>18}  {:>25}  {:>18}  {:>5}\n", "participant", "snaps",
                           "part low/mid/high", "vol silent/low/mid/high", "emo neg/neu/pos", "intr");
  for (const auto& z : rows) {
    std::cout << fmt::format("{:<12} {:>5}  {:5.1f} {:5.1f} {:5.1f}  {:5.1f} {:5.1f} {:5.1f} {:5.1f}  {:5.1f} {:5.1f} {:5.1f}  {:>5}\n",
                             z.participant, z.snapshots, z.participation[0], z.participation[1],
                             z.participation[2], z.volume[0], z.volume[1], z.volume[2], z.volume[3], z.emotion[0],
                             z.emotion[1], z.emotion[2], z.interruptions);
  }
  if (!r.divergences.empty())
    std::cerr << fmt::format("warning: {} divergences while replaying; run `groupfeed replay`\n",
                             r.divergences.size());
  return 0;
}

int run_anova(const std::string& path, std::optional<int> bonferroni_m, double alpha) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  const auto samples = analysis::read_samples_csv(in);
  analysis::print_anova(std::cout, analysis::anova2x2(samples, alpha), bonferroni_m);
  return 0;
}

int run_synth(const std::string& spec_path, std::uint64_t seed, const std::string& out_path) {
  std::ifstream in(spec_path);
  if (!in) throw std::runtime_error("cannot read " + spec_path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw analysis::SynthError(spec_path + ": " + e.what());
  }
  const auto spec = analysis::parse_synth_spec(j);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  struct StreamSink final : session::LogSink {
    std::ostream& os;
    explicit StreamSink(std::ostream& o) : os(o) {}
    void append(std::string_view line) override { os << line << '\n'; }
  } sink(out);
  analysis::synthesize(spec, seed, sink);
  out.flush();
  if (!out) throw std::runtime_error("write to " + out_path + " failed");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"groupfeed: replay, summarize and analyse session logs"};
  app.require_subcommand(1);

  std::string path, csv, spec, out;
  std::size_t max_shown = 20;
  std::optional<int> bonferroni_m;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  double f = 0;
  int df1 = 1, df2 = 1;

  auto* replay = app.add_subcommand("replay", "recompute every snapshot and diff it against the log");
  replay->add_option("log", path, "session log")->required()->check(CLI::ExistingFile);
  replay->add_option("--max", max_shown, "divergences to print");

  auto* summarize = app.add_subcommand("summarize", "per-participant zone occupancy");
  summarize->add_option("log", path, "session log")->required()->check(CLI::ExistingFile);
  summarize->add_option("--csv", csv, "also write the table as CSV");

  auto* anova = app.add_subcommand("anova", "2x2 ANOVA over condition x session");
  anova->add_option("samples", path, "CSV with participant,condition,session,value")
      ->required()
      ->check(CLI::ExistingFile);
  anova->add_option("--bonferroni", bonferroni_m, "number of comparisons to correct for")
      ->check(CLI::PositiveNumber);
  anova->add_option("--alpha", alpha, "significance level")->check(CLI::Range(0.0, 1.0));

  auto* synth = app.add_subcommand("synth", "generate a session log from a scripted schedule");
  synth->add_option("spec", spec, "JSON schedule")->required()->check(CLI::ExistingFile);
  synth->add_option("--seed", seed, "jitter seed");
  synth->add_option("-o,--out", out, "output log")->required();

  auto* pvalue = app.add_subcommand("pvalue", "upper-tail p-value of an F statistic");
  pvalue->add_option("F", f)->required();
  pvalue->add_option("df1", df1)->required();
  pvalue->add_option("df2", df2)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*replay) return run_replay(path, max_shown);
    if (*summarize) return run_summarize(path, csv);
    if (*anova) return run_anova(path, bonferroni_m, alpha);
    if (*synth) return run_synth(spec, seed, out);
    if (*pvalue) {
      std::cout << fmt::format("{:.6g}\n", analysis::pvalue_from_f(f, df1, df2));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
