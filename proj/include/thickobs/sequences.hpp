#pragma once

// Logarithmically convex sequences, the weights that induce them, and the
// quasi-analyticity diagnostics built on top (Denjoy-Carleman partial sums,
// Bang degrees, the gamma/Gamma growth functionals).
//
// Everything is carried in log-space: a sequence exposes log M_p, the log of
// consecutive ratios log(M_{p-1}/M_p), and the second difference
// log M_{p+1} + log M_{p-1} - 2 log M_p. Closed-form families override these
// with exact expressions so no cancellation between large log-factorials
// leaks into the ratios.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace thickobs {

/// Non-negative continuous weight on [0, inf).
struct WeightModel
{
  enum class Kind { linear, power, bertrand, tabulated };

  Kind kind = Kind::linear;
  double s = 1.0;  // power exponent, or the t^s numerator of the Bertrand weight
  int k = 1;       // number of nested log(e + .) factors (Bertrand)
  std::vector<double> nodes;   // tabulated: strictly increasing, nodes[0] == 0
  std::vector<double> values;  // tabulated: values at nodes, extended linearly past the end

  static WeightModel linear();
  static WeightModel power(double s);
  static WeightModel bertrand(int k, double s);
  static WeightModel tabulated(std::vector<double> nodes, std::vector<double> values);

  void validate() const;
  double operator()(double t) const;

  /// Slope of the linear extension past the last tabulated node.
  double tail_slope() const;

  /// Smallest c with Theta(t) <= t + c that can be shown analytically, if any.
  std::optional<double> linear_majorant_offset() const;
};

std::string to_string(WeightModel::Kind k);

struct WeightSupremum
{
  double log_value = 0.0;  // log sup_t t^p e^{-Theta(t)}; +inf when unbounded
  double maximizer = 0.0;  // argmax t (0 for p == 0 with Theta minimal at 0)
  bool finite = true;
};

/// log M_p = log sup_{t>=0} t^p e^{-Theta(t)} by bracketing and golden-section
/// search on log t (exact per-segment solve for tabulated weights).
WeightSupremum sequence_from_weight(const WeightModel& w, std::size_t p);

/// Positive sequence (M_p) held in log-space, optionally raised to a power.
class SequenceModel
{
 public:
  enum class Family { power_factorial, weight_induced, explicit_table };

  /// M_p = A^p (p!)^s. s = 0 with A = 1 is the constant sequence 1.
  static SequenceModel power_factorial(double A, double s);
  static SequenceModel constant_one() { return power_factorial(1.0, 0.0); }
  static SequenceModel weight_induced(WeightModel w);
  static SequenceModel explicit_log(std::vector<double> log_values);
  static SequenceModel explicit_values(const std::vector<double>& values);

  /// The sequence (M_p^sigma).
  SequenceModel powered(double sigma) const;

  Family family() const { return family_; }
  double A() const { return A_; }
  double s() const { return s_; }
  double exponent() const { return exponent_; }
  const WeightModel& weight() const { return weight_; }
  const std::vector<double>& table() const { return log_table_; }

  /// Largest index with a defined value; nullopt for closed forms.
  std::optional<std::size_t> max_index() const;
  bool defined(std::size_t p) const { return !max_index() || p <= *max_index(); }

  double log_value(std::size_t p) const;
  /// log M_0 .. log M_{count-1}
  std::vector<double> log_values(std::size_t count) const;
  /// log(M_{n-1} / M_n), n >= 1
  double log_ratio(std::size_t n) const;
  /// log M_{j+1} + log M_{j-1} - 2 log M_j, j >= 1
  double log_second_difference(std::size_t j) const;

  std::string describe() const;

 private:
  Family family_ = Family::power_factorial;
  double A_ = 1.0;
  double s_ = 1.0;
  WeightModel weight_;
  std::vector<double> log_table_;
  double exponent_ = 1.0;
};

struct LogConvexity
{
  bool ok = true;
  std::optional<std::size_t> first_violation;
};

/// 2 log M_p <= log M_{p+1} + log M_{p-1} + 1e-9 for 1 <= p <= up_to - 1.
LogConvexity is_log_convex(const SequenceModel& m, std::size_t up_to);

enum class QAVerdict { quasi_analytic, not_quasi_analytic, undecided };
std::string to_string(QAVerdict v);

struct H2Certificate
{
  double C_theta = 1.0;  // p^p <= C_theta L_theta^p M_p
  double L_theta = 1.0;
  double offset = 0.0;   // Theta(t) <= t + offset
};

struct QAReport
{
  bool is_log_convex = true;
  std::vector<double> dc_partial_sums;  // entry P-1 holds sum_{p=1}^{P} M_{p-1}/M_p
  QAVerdict verdict = QAVerdict::undecided;
  std::size_t horizon = 0;              // P for undecided(P)
  std::string certificate;              // how the verdict was reached
  std::optional<H2Certificate> h2_constants;
};

/// Partial sums of the Denjoy-Carleman series plus a verdict that is only
/// definite when an analytic certificate exists. Throws DomainError for
/// non-log-convex input.
QAReport denjoy_carleman_diagnostic(const SequenceModel& m, std::size_t P);

struct BangDegree
{
  enum class Status { finite, infinite, undetermined };
  Status status = Status::finite;
  std::uint64_t value = 0;

  bool is_finite() const { return status == Status::finite; }
  std::string to_string() const;  // "3", "INF", "UNDECIDED"
};

struct BangOptions
{
  std::size_t max_direct_terms = 20'000'000;  // closed forms: switch to Euler-Maclaurin past this
  std::size_t max_numeric_terms = 200'000;    // weight-induced: give up past this
};

/// sup{N : sum_{-log t < n <= N} M_{n-1}/M_n < r}.
BangDegree bang_degree(const SequenceModel& m, double t, double r, const BangOptions& opts = {});

struct GammaValues
{
  double gamma = 0.0;      // sup_{1<=j<=p} j (M_{j+1} M_{j-1} / M_j^2 - 1)
  double log_Gamma = 0.0;  // log(4 e^{4 + 4 gamma})
  double Gamma() const;
};

GammaValues gamma_Gamma(const SequenceModel& m, std::size_t p);

/// Upper bound on the Bang degree of (A^p (p!)^s), 0 < s <= 1.
double bang_bound_power_factorial(double s, double A, double t, double r);

enum class Certainty { verified, failed, undecided };
std::string to_string(Certainty c);

struct HypothesisReport
{
  bool h1 = true;
  std::optional<std::size_t> h1_first_infinite;
  Certainty h2 = Certainty::undecided;
  std::optional<H2Certificate> h2_constants;
  std::string h2_reason;
  double s = 1.0;
  QAReport h3;  // Denjoy-Carleman diagnostic on (M_p^s)
};

HypothesisReport check_hypotheses(const WeightModel& w, double s, std::size_t P);

}  // namespace thickobs
