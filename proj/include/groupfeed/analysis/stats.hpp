#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace groupfeed::analysis {

/// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1].
double incomplete_beta(double a, double b, double x);

/// Upper tail P(F' > f) of the F(df1, df2) distribution.
/// Throws std::domain_error for negative or NaN f, or degrees of freedom < 1.
double pvalue_from_f(double f, int df1, int df2);

/// min(1, p * m).
double bonferroni(double p, int m);

enum class Condition { Control, Treatment };
enum class SessionIndex { First, Second };

std::optional<Condition> parse_condition(std::string_view s);
std::optional<SessionIndex> parse_session(std::string_view s);

/// One observation: a participant's value (e.g. low-zone occupancy) for one
/// condition and session.
struct CellSample {
  Condition condition = Condition::Control;
  SessionIndex session = SessionIndex::First;
  std::string participant;
  double value = 0.0;
};

class AnovaError : public std::runtime_error {
 public:
  enum class Kind { Unbalanced, TooFewObservations };
  AnovaError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

struct AnovaEffect {
  double ss = 0.0;
  double df = 1.0;
  double ms = 0.0;
  double f = 0.0;  // NaN when the design is degenerate
  double p = 1.0;  // NaN when the design is degenerate
  bool significant = false;
};

struct CellSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation
};

/// Fixed-effects 2 (condition) x 2 (session) decomposition.
struct AnovaTable {
  AnovaEffect condition;
  AnovaEffect session;
  AnovaEffect interaction;
  double ss_within = 0.0;
  double df_within = 0.0;
  double ms_within = 0.0;
  double ss_total = 0.0;
  double alpha = 0.05;
  /// Zero within-cell variance: F and p are NaN.
  bool degenerate = false;
  /// cells[condition][session]
  std::array<std::array<CellSummary, 2>, 2> cells{};
};

/// Requires the same number (>= 2) of observations in each of the four cells.
AnovaTable anova2x2(std::span<const CellSample> samples, double alpha = 0.05);

/// Reads `condition,session,participant,value` rows (header line required).
std::vector<CellSample> read_samples_csv(std::istream& in);

void print_anova(std::ostream& out, const AnovaTable& table, std::optional<int> bonferroni_m = std::nullopt);

}  // namespace groupfeed::analysis
