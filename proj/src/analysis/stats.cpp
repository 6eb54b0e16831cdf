#include "groupfeed/analysis/stats.hpp"

#include <boost/tokenizer.hpp>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>

namespace groupfeed::analysis {

namespace {

constexpr double kEpsilon = 1e-15;
constexpr double kTiny = 1e-300;
constexpr int kMaxIterations = 10000;

// Continued fraction for I_x(a,b), modified Lentz. Converges quickly for
// x < (a+1)/(a+b+2).
double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEpsilon) return h;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || !(x >= 0.0 && x <= 1.0))
    throw std::domain_error("incomplete_beta: need a > 0, b > 0, 0 <= x <= 1");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double pvalue_from_f(double f, int df1, int df2) {
  if (std::isnan(f) || f < 0.0) throw std::domain_error("pvalue_from_f: F must be >= 0");
  if (df1 < 1 || df2 < 1) throw std::domain_error("pvalue_from_f: degrees of freedom must be >= 1");
  if (f == 0.0) return 1.0;
  if (std::isinf(f)) return 0.0;
  const double d1 = df1, d2 = df2;
  // P(F > f) = I_{d2/(d2 + d1 f)}(d2/2, d1/2)
  return incomplete_beta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f));
}

double bonferroni(double p, int m) {
  if (m < 1) throw std::domain_error("bonferroni: m must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("bonferroni: p must be in [0, 1]");
  return std::min(1.0, p * m);
}

std::optional<Condition> parse_condition(std::string_view s) {
  if (s == "control" || s == "Control" || s == "c") return Condition::Control;
  if (s == "treatment" || s == "Treatment" || s == "t") return Condition::Treatment;
  return std::nullopt;
}

std::optional<SessionIndex> parse_session(std::string_view s) {
  if (s == "s1" || s == "1" || s == "session-1") return SessionIndex::First;
  if (s == "s2" || s == "2" || s == "session-2") return SessionIndex::Second;
  return std::nullopt;
}

AnovaTable anova2x2(std::span<const CellSample> samples, double alpha) {
  std::array<std::array<std::vector<double>, 2>, 2> cells;
  for (const auto& s : samples)
    cells[static_cast<int>(s.condition)][static_cast<int>(s.session)].push_back(s.value);

  const std::size_t n = cells[0][0].size();
  for (const auto& row : cells)
    for (const auto& cell : row) {
      if (cell.size() != n)
        throw AnovaError(AnovaError::Kind::Unbalanced, "unbalanced design: cells differ in size");
    }
  if (n < 2)
    throw AnovaError(AnovaError::Kind::TooFewObservations, "need at least 2 observations per cell");

  AnovaTable t;
  t.alpha = alpha;
  double grand = 0.0;
  std::array<std::array<double, 2>, 2> mean{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      double sum = 0.0;
      for (double v : cells[i][j]) sum += v;
      mean[i][j] = sum / static_cast<double>(n);
      grand += sum;
    }
  const double total_n = 4.0 * static_cast<double>(n);
  grand /= total_n;
  const std::array<double, 2> row{(mean[0][0] + mean[0][1]) / 2.0, (mean[1][0] + mean[1][1]) / 2.0};
  const std::array<double, 2> col{(mean[0][0] + mean[1][0]) / 2.0, (mean[0][1] + mean[1][1]) / 2.0};

  const double dn = static_cast<double>(n);
  for (int i = 0; i < 2; ++i) {
    t.condition.ss += 2.0 * dn * (row[i] - grand) * (row[i] - grand);
    t.session.ss += 2.0 * dn * (col[i] - grand) * (col[i] - grand);
  }
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double r = mean[i][j] - row[i] - col[j] + grand;
      t.interaction.ss += dn * r * r;
      double within = 0.0;
      for (double v : cells[i][j]) {
        within += (v - mean[i][j]) * (v - mean[i][j]);
        t.ss_total += (v - grand) * (v - grand);
      }
      t.ss_within += within;
      t.cells[i][j] = CellSummary{n, mean[i][j], std::sqrt(within / (dn - 1.0))};
    }

  t.df_within = total_n - 4.0;
  t.ms_within = t.ss_within / t.df_within;
  t.degenerate = !(t.ss_within > 0.0);
  for (AnovaEffect* e : {&t.condition, &t.session, &t.interaction}) {
    e->df = 1.0;
    e->ms = e->ss;
    if (t.degenerate) {
      e->f = std::numeric_limits<double>::quiet_NaN();
      e->p = std::numeric_limits<double>::quiet_NaN();
      e->significant = false;
    } else {
      e->f = e->ms / t.ms_within;
      e->p = pvalue_from_f(e->f, 1, static_cast<int>(t.df_within));
      e->significant = e->p < alpha;
    }
  }
  return t;
}

std::vector<CellSample> read_samples_csv(std::istream& in) {
  using Tokenizer = boost::tokenizer<boost::escaped_list_separator<char>>;
  std::vector<CellSample> out;
  std::string line;
  std::size_t line_no = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string> fields;
    try {
      Tokenizer tok(line);
      fields.assign(tok.begin(), tok.end());
    } catch (const boost::escaped_list_error& e) {
      throw std::runtime_error("samples line " + std::to_string(line_no) + ": " + e.what());
    }
    if (header) {
      header = false;
      if (fields.size() < 4 || fields[0] != "condition" || fields[1] != "session" ||
          fields[2] != "participant" || fields[3] != "value")
        throw std::runtime_error("samples header must be condition,session,participant,value");
      continue;
    }
    if (fields.size() != 4)
      throw std::runtime_error("samples line " + std::to_string(line_no) + ": expected 4 fields");
    auto cond = parse_condition(fields[0]);
    auto sess = parse_session(fields[1]);
    if (!cond || !sess)
      throw std::runtime_error("samples line " + std::to_string(line_no) + ": bad condition or session");
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(fields[3], &used);
      if (used != fields[3].size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw std::runtime_error("samples line " + std::to_string(line_no) + ": bad value");
    }
    out.push_back(CellSample{*cond, *sess, fields[2], value});
  }
  return out;
}

void print_anova(std::ostream& out, const AnovaTable& t, std::optional<int> bonferroni_m) {
  const auto flags = out.flags();
  out << std::setprecision(6);
  out << "cell,n,mean,sd\n";
  const char* cond[] = {"control", "treatment"};
  const char* sess[] = {"s1", "s2"};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out << cond[i] << '-' << sess[j] << ',' << t.cells[i][j].n << ',' << t.cells[i][j].mean << ','
          << t.cells[i][j].sd << '\n';
  out << "\nsource,ss,df,ms,f,p" << (bonferroni_m ? ",p_bonferroni" : "") << ",significant\n";
  auto row = [&](const char* name, const AnovaEffect& e) {
    double p = e.p;
    out << name << ',' << e.ss << ',' << e.df << ',' << e.ms << ',' << e.f << ',' << e.p;
    if (bonferroni_m) {
      p = std::isnan(e.p) ? e.p : bonferroni(e.p, *bonferroni_m);
      out << ',' << p;
    }
    out << ',' << (!std::isnan(p) && p < t.alpha ? "yes" : "no") << '\n';
  };
  row("condition", t.condition);
  row("session", t.session);
  row("interaction", t.interaction);
  out << "within," << t.ss_within << ',' << t.df_within << ',' << t.ms_within << ",,\n";
  out << "total," << t.ss_total << ',' << t.df_within + 3.0 << ",,,\n";
  if (t.degenerate) out << "# degenerate: zero within-cell variance, F undefined\n";
  out.flags(flags);
}

}  // namespace groupfeed::analysis
