#include "thickobs/sequences.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "thickobs/error.hpp"

namespace thickobs {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogConvexSlack = 1e-9;

// g(t) = log(e + t), composed up to k times; returns the product of the
// k nested values g(t) * g(g(t)) * ...
double bertrand_denominator(double t, int k)
{
  double prod = 1.0;
  double g = t;
  for (int i = 0; i < k; ++i) {
    g = std::log(std::numbers::e + g);
    prod *= g;
  }
  return prod;
}

// t Theta'(t) for the closed-form weights
double t_dtheta(const WeightModel& w, double t)
{
  switch (w.kind) {
    case WeightModel::Kind::linear:
      return t;
    case WeightModel::Kind::power:
      return w.s * std::pow(t, w.s);
    case WeightModel::Kind::bertrand: {
      double g = t, dg = 1.0, logder = 0.0;
      for (int i = 0; i < w.k; ++i) {
        dg = dg / (std::numbers::e + g);
        g = std::log(std::numbers::e + g);
        logder += dg / g;
      }
      return w(t) * (w.s - t * logder);
    }
    case WeightModel::Kind::tabulated:
      break;
  }
  return 0.0;
}

// Euler-Maclaurin partial sum of n^{-e} for n = a..b (inclusive), a >= 1.
double power_sum(double e, double a, double b)
{
  if (b < a) return 0.0;
  constexpr int kDirect = 12;
  double sum = 0.0;
  double n = a;
  for (int i = 0; i < kDirect && n <= b; ++i, n += 1.0) sum += std::pow(n, -e);
  if (n > b) return sum;
  const double M = n;
  auto f = [e](double x) { return std::pow(x, -e); };
  // j-th derivative of x^{-e}: (-1)^j e (e+1) ... (e+j-1) x^{-e-j}
  auto deriv = [e](double x, int j) {
    double c = 1.0;
    for (int i = 0; i < j; ++i) c *= -(e + i);
    return c * std::pow(x, -e - j);
  };
  double integral = (e == 1.0) ? std::log(b / M) : (std::pow(b, 1.0 - e) - std::pow(M, 1.0 - e)) / (1.0 - e);
  sum += integral + 0.5 * (f(M) + f(b));
  // B_2/2!, B_4/4!, B_6/6!, B_8/8!, B_10/10!
  static constexpr std::array<double, 5> kB = {1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0,
                                               -1.0 / 1209600.0, 1.0 / 47900160.0};
  for (int k = 1; k <= 5; ++k) sum += kB[k - 1] * (deriv(b, 2 * k - 1) - deriv(M, 2 * k - 1));
  return sum;
}

// sum_{n >= a} n^{-e} for e > 1.
double hurwitz_zeta(double e, double a)
{
  constexpr int kDirect = 12;
  double sum = 0.0;
  double n = a;
  for (int i = 0; i < kDirect; ++i, n += 1.0) sum += std::pow(n, -e);
  const double M = n;
  auto deriv = [e](double x, int j) {
    double c = 1.0;
    for (int i = 0; i < j; ++i) c *= -(e + i);
    return c * std::pow(x, -e - j);
  };
  sum += std::pow(M, 1.0 - e) / (e - 1.0) + 0.5 * std::pow(M, -e);
  static constexpr std::array<double, 5> kB = {1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0,
                                               -1.0 / 1209600.0, 1.0 / 47900160.0};
  for (int k = 1; k <= 5; ++k) sum -= kB[k - 1] * deriv(M, 2 * k - 1);
  return sum;
}

std::uint64_t first_bang_index(double t)
{
  double L = -std::log(t);
  if (L < 0.0) L = 0.0;
  return static_cast<std::uint64_t>(std::floor(L)) + 1;
}

void require_bang_domain(double t, double r)
{
  if (!(t > 0.0 && t <= 1.0)) throw DomainError("Bang degree: t must lie in (0, 1]");
  if (!(r > 0.0)) throw DomainError("Bang degree: r must be positive");
}

}  // namespace

// ---------------------------------------------------------------------------
// WeightModel

WeightModel WeightModel::linear() { return WeightModel{}; }

WeightModel WeightModel::power(double s)
{
  WeightModel w;
  w.kind = Kind::power;
  w.s = s;
  w.validate();
  return w;
}

WeightModel WeightModel::bertrand(int k, double s)
{
  WeightModel w;
  w.kind = Kind::bertrand;
  w.k = k;
  w.s = s;
  w.validate();
  return w;
}

WeightModel WeightModel::tabulated(std::vector<double> nodes, std::vector<double> values)
{
  WeightModel w;
  w.kind = Kind::tabulated;
  w.nodes = std::move(nodes);
  w.values = std::move(values);
  w.validate();
  return w;
}

void WeightModel::validate() const
{
  switch (kind) {
    case Kind::linear:
      return;
    case Kind::power:
      if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("power weight: exponent must be positive");
      return;
    case Kind::bertrand:
      if (k < 1) throw DomainError("Bertrand weight: k must be >= 1");
      if (!(s >= 0.5 && s <= 1.0)) throw DomainError("Bertrand weight: s must lie in [1/2, 1]");
      return;
    case Kind::tabulated: {
      if (nodes.size() < 2 || nodes.size() != values.size())
        throw DomainError("tabulated weight: need >= 2 nodes and matching values");
      if (nodes.front() != 0.0) throw DomainError("tabulated weight: first node must be 0");
      for (std::size_t i = 1; i < nodes.size(); ++i)
        if (!(nodes[i] > nodes[i - 1])) throw DomainError("tabulated weight: nodes must increase");
      for (double v : values)
        if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("tabulated weight: values must be finite and >= 0");
      if (tail_slope() < 0.0) throw DomainError("tabulated weight: last segment must be non-decreasing");
      return;
    }
  }
}

double WeightModel::tail_slope() const
{
  const std::size_t n = nodes.size();
  return (values[n - 1] - values[n - 2]) / (nodes[n - 1] - nodes[n - 2]);
}

double WeightModel::operator()(double t) const
{
  switch (kind) {
    case Kind::linear:
      return t;
    case Kind::power:
      return std::pow(t, s);
    case Kind::bertrand:
      return std::pow(t, s) / bertrand_denominator(t, k);
    case Kind::tabulated: {
      if (t >= nodes.back()) return values.back() + tail_slope() * (t - nodes.back());
      auto it = std::upper_bound(nodes.begin(), nodes.end(), t);
      const std::size_t i = static_cast<std::size_t>(it - nodes.begin()) - 1;
      const double lam = (t - nodes[i]) / (nodes[i + 1] - nodes[i]);
      return values[i] + lam * (values[i + 1] - values[i]);
    }
  }
  return 0.0;
}

std::optional<double> WeightModel::linear_majorant_offset() const
{
  // sup_t (t^a - t) for 0 < a < 1, attained at t = a^{1/(1-a)}
  auto concave_gap = [](double a) {
    if (a >= 1.0) return 0.0;
    const double ts = std::pow(a, 1.0 / (1.0 - a));
    return std::pow(ts, a) - ts;
  };
  switch (kind) {
    case Kind::linear:
      return 0.0;
    case Kind::power:
      if (s <= 1.0) return concave_gap(s);
      return std::nullopt;
    case Kind::bertrand:
      // the denominators are >= 1, so Theta_{k,s}(t) <= t^s
      return concave_gap(s);
    case Kind::tabulated: {
      if (tail_slope() > 1.0) return std::nullopt;
      double c = 0.0;
      for (std::size_t i = 0; i < nodes.size(); ++i) c = std::max(c, values[i] - nodes[i]);
      return c;
    }
  }
  return std::nullopt;
}

std::string to_string(WeightModel::Kind k)
{
  switch (k) {
    case WeightModel::Kind::linear: return "linear";
    case WeightModel::Kind::power: return "power";
    case WeightModel::Kind::bertrand: return "bertrand";
    case WeightModel::Kind::tabulated: return "tabulated";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// sup_t t^p e^{-Theta(t)}

namespace {

WeightSupremum tabulated_supremum(const WeightModel& w, std::size_t p)
{
  const auto& t = w.nodes;
  const auto& v = w.values;
  const double pd = static_cast<double>(p);
  WeightSupremum best{-kInf, 0.0, true};
  auto consider = [&](double tt, double theta) {
    if (tt <= 0.0) return;
    const double val = pd * std::log(tt) - theta;
    if (val > best.log_value) best = {val, tt, true};
  };
  const std::size_t n = t.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double b = (v[i + 1] - v[i]) / (t[i + 1] - t[i]);
    consider(t[i], v[i]);
    consider(t[i + 1], v[i + 1]);
    if (b > 0.0) {
      const double ts = pd / b;
      if (ts > t[i] && ts < t[i + 1]) consider(ts, v[i] + b * (ts - t[i]));
    }
  }
  const double b = w.tail_slope();
  if (b <= 0.0) return {kInf, kInf, false};
  const double ts = pd / b;
  if (ts > t.back()) consider(ts, v.back() + b * (ts - t.back()));
  return best;
}

}  // namespace

WeightSupremum sequence_from_weight(const WeightModel& w, std::size_t p)
{
  w.validate();
  if (p == 0) {
    if (w.kind == WeightModel::Kind::tabulated) {
      auto it = std::min_element(w.values.begin(), w.values.end());
      return {-*it, w.nodes[static_cast<std::size_t>(it - w.values.begin())], true};
    }
    return {-w(0.0), 0.0, true};
  }
  if (w.kind == WeightModel::Kind::tabulated) return tabulated_supremum(w, p);

  const double pd = static_cast<double>(p);
  auto h = [&](double u) { return pd * u - w(std::exp(u)); };
  constexpr double kUmax = 700.0;

  double step = 1.0;
  double b = std::log(pd);
  double hb = h(b);
  double a = b - step, c = b + step;
  double ha = h(a), hc = h(c);
  while (hc > hb) {
    a = b; ha = hb;
    b = c; hb = hc;
    step *= 2.0;
    c = b + step;
    if (c > kUmax) return {kInf, kInf, false};
    hc = h(c);
  }
  while (ha > hb) {
    c = b; hc = hb;
    b = a; hb = ha;
    step *= 2.0;
    a = b - step;
    if (a < -kUmax) break;
    ha = h(a);
  }

  // golden-section search on [a, c]
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = c - kInvPhi * (c - a);
  double x2 = a + kInvPhi * (c - a);
  double f1 = h(x1), f2 = h(x2);
  for (int it = 0; it < 400; ++it) {
    if (c - a <= 1e-10 * std::max(1.0, std::abs(0.5 * (a + c)))) break;
    if (f1 < f2) {
      a = x1;
      x1 = x2; f1 = f2;
      x2 = a + kInvPhi * (c - a);
      f2 = h(x2);
    } else {
      c = x2;
      x2 = x1; f2 = f1;
      x1 = c - kInvPhi * (c - a);
      f1 = h(x1);
    }
  }
  double ubest = b, hbest = hb;
  if (f1 > hbest) { ubest = x1; hbest = f1; }
  if (f2 > hbest) { ubest = x2; hbest = f2; }

  // polish: bisection on the stationarity condition p = t Theta'(t), which
  // resolves the maximizer far below the sqrt(eps) floor of golden section
  auto F = [&](double u) { return pd - t_dtheta(w, std::exp(u)); };
  double lo = ubest - 1e-6, hi = ubest + 1e-6;
  if (F(lo) > 0.0 && F(hi) < 0.0) {
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (F(mid) > 0.0 ? lo : hi) = mid;
    }
    const double u = 0.5 * (lo + hi);
    const double hu = h(u);
    if (hu >= hbest - 1e-14 * std::max(1.0, std::abs(hbest))) {
      ubest = u;
      hbest = std::max(hu, hbest);
    }
  }
  return {hbest, std::exp(ubest), true};
}

// ---------------------------------------------------------------------------
// SequenceModel

SequenceModel SequenceModel::power_factorial(double A, double s)
{
  if (!(A > 0.0) || !std::isfinite(A)) throw DomainError("power_factorial: A must be positive");
  if (!(s >= 0.0) || !std::isfinite(s)) throw DomainError("power_factorial: s must be >= 0");
  SequenceModel m;
  m.family_ = Family::power_factorial;
  m.A_ = A;
  m.s_ = s;
  return m;
}

SequenceModel SequenceModel::weight_induced(WeightModel w)
{
  w.validate();
  SequenceModel m;
  m.family_ = Family::weight_induced;
  m.weight_ = std::move(w);
  return m;
}

SequenceModel SequenceModel::explicit_log(std::vector<double> log_values)
{
  if (log_values.empty()) throw DomainError("explicit sequence: empty table");
  for (double v : log_values)
    if (!std::isfinite(v)) throw DomainError("explicit sequence: values must be positive and finite");
  SequenceModel m;
  m.family_ = Family::explicit_table;
  m.log_table_ = std::move(log_values);
  return m;
}

SequenceModel SequenceModel::explicit_values(const std::vector<double>& values)
{
  std::vector<double> logs;
  logs.reserve(values.size());
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("explicit sequence: values must be positive and finite");
    logs.push_back(std::log(v));
  }
  return explicit_log(std::move(logs));
}

SequenceModel SequenceModel::powered(double sigma) const
{
  if (!(sigma > 0.0)) throw DomainError("sequence power must be positive");
  SequenceModel m = *this;
  m.exponent_ *= sigma;
  return m;
}

std::optional<std::size_t> SequenceModel::max_index() const
{
  if (family_ == Family::explicit_table) return log_table_.size() - 1;
  return std::nullopt;
}

double SequenceModel::log_value(std::size_t p) const
{
  switch (family_) {
    case Family::power_factorial: {
      const double pd = static_cast<double>(p);
      const double lf = (s_ == 0.0) ? 0.0 : s_ * std::lgamma(pd + 1.0);
      return exponent_ * (pd * std::log(A_) + lf);
    }
    case Family::weight_induced:
      return exponent_ * sequence_from_weight(weight_, p).log_value;
    case Family::explicit_table:
      if (p >= log_table_.size()) throw DomainError("explicit sequence: index beyond table");
      return exponent_ * log_table_[p];
  }
  return 0.0;
}

std::vector<double> SequenceModel::log_values(std::size_t count) const
{
  std::vector<double> out(count);
  for (std::size_t p = 0; p < count; ++p) out[p] = log_value(p);
  return out;
}

double SequenceModel::log_ratio(std::size_t n) const
{
  if (n == 0) throw DomainError("log_ratio: index must be >= 1");
  if (family_ == Family::power_factorial)
    return -exponent_ * (std::log(A_) + s_ * std::log(static_cast<double>(n)));
  return log_value(n - 1) - log_value(n);
}

double SequenceModel::log_second_difference(std::size_t j) const
{
  if (j == 0) throw DomainError("second difference: index must be >= 1");
  if (family_ == Family::power_factorial)
    return exponent_ * s_ * std::log1p(1.0 / static_cast<double>(j));
  return log_value(j + 1) + log_value(j - 1) - 2.0 * log_value(j);
}

std::string SequenceModel::describe() const
{
  std::ostringstream os;
  switch (family_) {
    case Family::power_factorial:
      os << "power_factorial(A=" << A_ << ", s=" << s_ << ")";
      break;
    case Family::weight_induced:
      os << "weight_induced(" << to_string(weight_.kind) << ")";
      break;
    case Family::explicit_table:
      os << "explicit(" << log_table_.size() << " values)";
      break;
  }
  if (exponent_ != 1.0) os << "^" << exponent_;
  return os.str();
}

// ---------------------------------------------------------------------------

LogConvexity is_log_convex(const SequenceModel& m, std::size_t up_to)
{
  if (auto mi = m.max_index(); mi && up_to > *mi)
    throw DomainError("is_log_convex: up_to exceeds the last defined index");
  if (up_to < 2) return {};
  if (m.family() == SequenceModel::Family::power_factorial) return {};  // second differences are s log(1 + 1/j) >= 0
  const auto lv = m.log_values(up_to + 1);
  for (std::size_t p = 1; p + 1 <= up_to; ++p) {
    if (2.0 * lv[p] > lv[p + 1] + lv[p - 1] + kLogConvexSlack) return {false, p};
  }
  return {};
}

std::string to_string(QAVerdict v)
{
  switch (v) {
    case QAVerdict::quasi_analytic: return "quasi_analytic";
    case QAVerdict::not_quasi_analytic: return "not_quasi_analytic";
    case QAVerdict::undecided: return "undecided";
  }
  return "?";
}

std::string to_string(Certainty c)
{
  switch (c) {
    case Certainty::verified: return "verified";
    case Certainty::failed: return "failed";
    case Certainty::undecided: return "undecided";
  }
  return "?";
}

namespace {

struct Classification
{
  QAVerdict verdict = QAVerdict::undecided;
  std::string certificate;
};

// Analytic classification of sum (M_{p-1}/M_p) for the closed-form families.
Classification classify_closed_form(const SequenceModel& m)
{
  const double sigma = m.exponent();
  std::ostringstream os;
  switch (m.family()) {
    case SequenceModel::Family::power_factorial: {
      const double e = m.s() * sigma;
      os << "ratio terms are A^{-" << sigma << "} p^{-" << e << "}: ";
      if (e <= 1.0) {
        os << "p-series with exponent <= 1 diverges";
        return {QAVerdict::quasi_analytic, os.str()};
      }
      os << "p-series with exponent > 1 converges";
      return {QAVerdict::not_quasi_analytic, os.str()};
    }
    case SequenceModel::Family::weight_induced: {
      const WeightModel& w = m.weight();
      switch (w.kind) {
        case WeightModel::Kind::linear:
          // M_p = (p/e)^p and 1/p <= M_{p-1}/M_p <= e/p
          os << "M_p = (p/e)^p, ratio terms between p^{-" << sigma << "} and (e/p)^" << sigma;
          return {sigma <= 1.0 ? QAVerdict::quasi_analytic : QAVerdict::not_quasi_analytic, os.str()};
        case WeightModel::Kind::power: {
          // M_p = (p/(a e))^{p/a}; ratio terms between (a/p)^{1/a} and (a e/p)^{1/a}
          const double e = sigma / w.s;
          os << "M_p = (p/(a e))^{p/a}, ratio terms comparable to p^{-" << e << "}";
          return {e <= 1.0 ? QAVerdict::quasi_analytic : QAVerdict::not_quasi_analytic, os.str()};
        }
        case WeightModel::Kind::bertrand:
          if (sigma <= w.s) {
            os << "Bertrand weight Theta_{k,s}: (M_p^s) quasi-analytic, exponent " << sigma << " <= s";
            return {QAVerdict::quasi_analytic, os.str()};
          }
          return {QAVerdict::undecided, "Bertrand weight with exponent above s: no certificate"};
        case WeightModel::Kind::tabulated: {
          const double b = w.tail_slope();
          if (b > 0.0) {
            os << "linear tail Theta(t) = " << b << " t + c: eventually M_p = e^{-c}(p/(b e))^p";
            return {sigma <= 1.0 ? QAVerdict::quasi_analytic : QAVerdict::not_quasi_analytic, os.str()};
          }
          return {QAVerdict::undecided, "tabulated weight with flat tail"};
        }
      }
      break;
    }
    case SequenceModel::Family::explicit_table:
      break;
  }
  return {};
}

// Comparison test for a finite table: exhibit a_p <= C p^{-sigma} with sigma > 1
// across the tail of the table.
Classification classify_table(const std::vector<double>& log_terms)
{
  const std::size_t P = log_terms.size();
  if (P < 16) return {};
  const std::size_t first = P / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double cnt = 0;
  for (std::size_t i = first; i < P; ++i) {
    const double x = std::log(static_cast<double>(i + 1));
    const double y = log_terms[i];
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    cnt += 1;
  }
  const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  const double decay = -slope;
  if (!(decay > 1.1)) return {};
  const double sigma = 0.5 * (1.0 + decay);
  double logC = -kInf;
  for (std::size_t i = first; i < P; ++i)
    logC = std::max(logC, log_terms[i] + sigma * std::log(static_cast<double>(i + 1)));
  std::ostringstream os;
  os << "comparison: tail terms p=" << first + 1 << ".." << P << " satisfy a_p <= "
     << std::exp(logC) << " p^{-" << sigma << "} (fitted decay " << decay << ")";
  return {QAVerdict::not_quasi_analytic, os.str()};
}

}  // namespace

QAReport denjoy_carleman_diagnostic(const SequenceModel& m, std::size_t P)
{
  QAReport rep;
  std::size_t horizon = P;
  if (auto mi = m.max_index()) horizon = std::min(horizon, *mi);
  rep.horizon = horizon;

  std::vector<double> log_terms(horizon);
  if (m.family() == SequenceModel::Family::power_factorial) {
    for (std::size_t p = 1; p <= horizon; ++p) log_terms[p - 1] = m.log_ratio(p);
  } else {
    const std::size_t count = std::min(horizon + 2, m.max_index() ? *m.max_index() + 1 : horizon + 2);
    const auto lv = m.log_values(count);
    for (std::size_t p = 1; p + 1 < count; ++p) {
      if (2.0 * lv[p] > lv[p + 1] + lv[p - 1] + kLogConvexSlack) {
        rep.is_log_convex = false;
        throw DomainError("Denjoy-Carleman diagnostic: sequence is not log-convex at p = " + std::to_string(p));
      }
    }
    for (std::size_t p = 1; p <= horizon; ++p) log_terms[p - 1] = lv[p - 1] - lv[p];
  }

  rep.dc_partial_sums.resize(horizon);
  double acc = 0.0;
  for (std::size_t i = 0; i < horizon; ++i) {
    acc += std::exp(log_terms[i]);
    rep.dc_partial_sums[i] = acc;
  }

  Classification c = (m.family() == SequenceModel::Family::explicit_table)
                         ? classify_table(log_terms)
                         : classify_closed_form(m);
  rep.verdict = c.verdict;
  rep.certificate = c.verdict == QAVerdict::undecided && c.certificate.empty()
                        ? "no analytic certificate; undecided at P = " + std::to_string(horizon)
                        : c.certificate;
  return rep;
}

// ---------------------------------------------------------------------------
// Bang degree

std::string BangDegree::to_string() const
{
  switch (status) {
    case Status::finite: return std::to_string(value);
    case Status::infinite: return "INF";
    case Status::undetermined: return "UNDECIDED";
  }
  return "?";
}

namespace {

BangDegree bang_power_factorial(const SequenceModel& m, double t, double r, const BangOptions& opts)
{
  const double sigma = m.exponent();
  const double e = m.s() * sigma;
  const double c = std::exp(-sigma * std::log(m.A()));
  const std::uint64_t n0 = first_bang_index(t);
  const double target = r / c;  // need sum_{n0..N} n^{-e} >= target

  if (e > 1.0 && hurwitz_zeta(e, static_cast<double>(n0)) <= target)
    return {BangDegree::Status::infinite, 0};

  double acc = 0.0;
  std::uint64_t n = n0;
  for (std::size_t i = 0; i < opts.max_direct_terms; ++i, ++n) {
    acc += c * std::pow(static_cast<double>(n), -e);
    if (acc >= r) return {BangDegree::Status::finite, n - 1};
  }
  // Large budgets: bracket then bisect on the Euler-Maclaurin partial sum.
  const double a = static_cast<double>(n0);
  double lo = static_cast<double>(n - 1);
  double hi = lo * 2.0;
  constexpr double kMaxIndex = 9.0e18;
  while (power_sum(e, a, hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (hi > kMaxIndex) throw NumericalError("Bang degree exceeds the representable index range");
  }
  while (hi - lo > 1.0) {
    const double mid = std::floor(0.5 * (lo + hi));
    if (power_sum(e, a, mid) >= target) hi = mid; else lo = mid;
  }
  return {BangDegree::Status::finite, static_cast<std::uint64_t>(hi) - 1};
}

}  // namespace

BangDegree bang_degree(const SequenceModel& m, double t, double r, const BangOptions& opts)
{
  require_bang_domain(t, r);
  if (m.family() == SequenceModel::Family::power_factorial) return bang_power_factorial(m, t, r, opts);

  const std::uint64_t n0 = first_bang_index(t);
  const auto mi = m.max_index();
  double acc = 0.0;
  double prev = 0.0;
  bool have_prev = false;
  std::size_t steps = 0;
  for (std::uint64_t n = n0;; ++n, ++steps) {
    if (mi && n > *mi) return {BangDegree::Status::undetermined, 0};
    if (!mi && steps >= opts.max_numeric_terms) return {BangDegree::Status::undetermined, 0};
    if (!have_prev) {
      prev = m.log_value(n - 1);
      have_prev = true;
    }
    const double cur = m.log_value(n);
    acc += std::exp(prev - cur);
    prev = cur;
    if (acc >= r) return {BangDegree::Status::finite, n - 1};
  }
}

// ---------------------------------------------------------------------------

double GammaValues::Gamma() const { return std::exp(log_Gamma); }

GammaValues gamma_Gamma(const SequenceModel& m, std::size_t p)
{
  if (p < 1) throw DomainError("gamma_Gamma: p must be >= 1");
  if (!m.defined(p + 1)) throw DomainError("gamma_Gamma: sequence undefined at index p + 1");
  double gamma = -kInf;
  if (m.family() == SequenceModel::Family::power_factorial) {
    for (std::size_t j = 1; j <= p; ++j)
      gamma = std::max(gamma, static_cast<double>(j) * std::expm1(m.log_second_difference(j)));
  } else {
    const auto lv = m.log_values(p + 2);
    for (std::size_t j = 1; j <= p; ++j)
      gamma = std::max(gamma, static_cast<double>(j) * std::expm1(lv[j + 1] + lv[j - 1] - 2.0 * lv[j]));
  }
  return {gamma, std::log(4.0) + 4.0 + 4.0 * gamma};
}

double bang_bound_power_factorial(double s, double A, double t, double r)
{
  if (!(s > 0.0 && s <= 1.0)) throw DomainError("bang bound: s must lie in (0, 1]");
  if (!(A >= 1.0)) throw DomainError("bang bound: A must be >= 1");
  require_bang_domain(t, r);
  if (s == 1.0) return (1.0 - std::log(t)) * std::exp(A * r);
  const double q = 1.0 / (1.0 - s);
  return std::pow(2.0, q) * (1.0 - std::log(t) + std::pow(A * r, q));
}

// ---------------------------------------------------------------------------

HypothesisReport check_hypotheses(const WeightModel& w, double s, std::size_t P)
{
  if (!(s > 0.0 && s <= 1.0)) throw DomainError("check_hypotheses: s must lie in (0, 1]");
  w.validate();
  HypothesisReport rep;
  rep.s = s;

  for (std::size_t p = 0; p <= P; ++p) {
    if (!sequence_from_weight(w, p).finite) {
      rep.h1 = false;
      rep.h1_first_infinite = p;
      break;
    }
  }

  if (auto c = w.linear_majorant_offset()) {
    rep.h2 = Certainty::verified;
    rep.h2_constants = H2Certificate{std::exp(*c), std::numbers::e, *c};
    std::ostringstream os;
    os << "Theta(t) <= t + " << *c << " gives M_p >= e^{-c} (p/e)^p";
    rep.h2_reason = os.str();
  } else if (w.kind == WeightModel::Kind::power && w.s > 1.0) {
    rep.h2 = Certainty::failed;
    rep.h2_reason = "M_p = (p/(a e))^{p/a} with a > 1 makes p^p / M_p grow super-exponentially";
  } else {
    rep.h2 = Certainty::undecided;
    rep.h2_reason = "no linear majorant certificate";
  }

  if (!rep.h1) {
    rep.h3.verdict = QAVerdict::undecided;
    rep.h3.certificate = "(H1) fails; sequence not finite";
    return rep;
  }
  rep.h3 = denjoy_carleman_diagnostic(SequenceModel::weight_induced(w).powered(s), P);
  if (rep.h2_constants) rep.h3.h2_constants = rep.h2_constants;
  return rep;
}

}  // namespace thickobs
