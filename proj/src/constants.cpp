#include "thickobs/constants.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "thickobs/csv.hpp"
#include "thickobs/error.hpp"

namespace thickobs {
namespace {

constexpr double kRegimeTol = 1e-12;

std::string num(double v) { return format_double(v); }

void require_finite_bang(const BangDegree& b, const char* who)
{
  if (b.status == BangDegree::Status::infinite)
    throw DomainError(std::string(who) + ": Bang degree is infinite; not quasi-analytic at these parameters");
  if (b.status == BangDegree::Status::undetermined)
    throw DomainError(std::string(who) + ": Bang degree undecided within the available terms");
}

}  // namespace

std::string to_string(Regime r) { return r == Regime::strict ? "strict" : "critical"; }

void GSParams::validate() const
{
  if (!(mu > 0.0 && mu <= 1.0)) throw DomainError("GSParams: mu must lie in (0, 1]");
  if (!(nu > 0.0)) throw DomainError("GSParams: nu must be positive");
  if (!(mu + nu >= 1.0 - kRegimeTol)) throw DomainError("GSParams: mu + nu must be >= 1");
  const double dm = delta_max();
  if (!(delta >= 0.0 && delta <= dm + kRegimeTol * std::max(1.0, dm)))
    throw DomainError("GSParams: delta must lie in [0, (1-mu)/nu]");
  if (!(A >= 1.0)) throw DomainError("GSParams: A must be >= 1");
  if (!(C >= 1.0)) throw DomainError("GSParams: C must be >= 1");
  if (!(r1 > 0.0)) throw DomainError("GSParams: r1 must be positive");
  if (!(r2 >= 0.0)) throw DomainError("GSParams: r2 must be >= 0");
  if (!(t0 > 0.0 && t0 <= 1.0)) throw DomainError("GSParams: t0 must lie in (0, 1]");
}

Regime GSParams::regime() const
{
  const double dm = delta_max();
  return std::abs(delta - dm) <= kRegimeTol * std::max(1.0, std::abs(dm)) ? Regime::critical : Regime::strict;
}

void ConstantReport::set_log_value(double v)
{
  if (!std::isfinite(v)) throw NumericalError(name + ": non-finite log value");
  log_value = v;
  if (v < std::log(1e300)) linear_value = std::exp(v);
  else linear_value.reset();
}

// ---------------------------------------------------------------------------

NsvResult nsv_constants(const SequenceModel& m, double t, double gamma, int d, double diam)
{
  if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("nsv_constants: gamma must lie in (0, 1]");
  if (d < 1) throw DomainError("nsv_constants: d must be >= 1");
  if (!(diam > 0.0)) throw DomainError("nsv_constants: diam must be positive");

  NsvResult res;
  res.r = d * diam * std::numbers::e;
  res.log_M0 = m.log_value(0);
  // Dividing by M_0 leaves every ratio M_{n-1}/M_n and every second
  // difference unchanged, so the Bang budget needs no adjustment.
  res.adjusted_r = res.r;
  res.n_star = bang_degree(m, t, res.r);
  require_finite_bang(res.n_star, "nsv_constants");
  const std::uint64_t n = res.n_star.value;
  if (n > 0) {
    const auto gg = gamma_Gamma(m, static_cast<std::size_t>(2 * n));
    res.gamma_2n = gg.gamma;
    res.log_Gamma_2n = gg.log_Gamma;
  }
  const double nd = static_cast<double>(n);
  const double logd = std::log(static_cast<double>(d));
  const double lg = std::log(gamma);

  auto common = [&](ConstantReport& r) {
    r.inputs = {{"sequence", m.describe()}, {"t", num(t)}, {"gamma", num(gamma)}, {"d", std::to_string(d)},
                {"diam", num(diam)}};
    r.notes.push_back("n* = " + res.n_star.to_string() + " with budget r = d diam e = " + num(res.r));
    if (res.log_M0 != 0.0)
      r.notes.push_back("sequence normalized by M_0 = exp(" + num(res.log_M0) + "); ratios unchanged, adjusted r = " +
                        num(res.adjusted_r));
  };

  res.linf.name = "nsv_linf_factor";
  common(res.linf);
  res.linf.citations = "((d/gamma) Gamma_M(2n*))^{2n*}, Gamma_M(p) = 4 e^{4 + 4 gamma_M(p)}";
  res.linf.set_log_value(n == 0 ? 0.0 : 2.0 * nd * (logd - lg + res.log_Gamma_2n));

  res.l2.name = "nsv_l2_factor";
  common(res.l2);
  res.l2.citations = "(2/gamma) ((2d/gamma) Gamma_M(2n*))^{4n*}";
  res.l2.set_log_value(std::log(2.0) - lg +
                       (n == 0 ? 0.0 : 4.0 * nd * (std::log(2.0) + logd - lg + res.log_Gamma_2n)));
  return res;
}

ConstantReport general_up_constant(const SequenceModel& diagonal, const DensityModel& rho, double gamma, int d,
                                   double eps, double K, double Kprime, double r)
{
  rho.validate();
  if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("general_up_constant: gamma must lie in (0, 1]");
  if (d < 1) throw DomainError("general_up_constant: d must be >= 1");
  if (!(K >= 1.0) || !(Kprime >= 1.0) || !(r >= 1.0))
    throw DomainError("general_up_constant: K, K' and r must be >= 1");
  const double logN00 = diagonal.log_value(0);
  if (!(eps > 0.0) || std::log(eps) > 2.0 * logN00 + 1e-12)
    throw DomainError("general_up_constant: eps must lie in (0, N_{0,0}^2]");
  const double logNdd = diagonal.log_value(static_cast<std::size_t>(d));

  ConstantReport rep;
  rep.name = "general_up_constant";
  rep.inputs = {{"diagonal", diagonal.describe()}, {"density", to_string(rho.kind)}, {"gamma", num(gamma)},
                {"d", std::to_string(d)}, {"eps", num(eps)}};
  rep.fitted_constants = {{"K", K}, {"K_prime", Kprime}, {"r", r}};
  rep.citations = "t0 = eps^{1/2}/(K N_{d,d}); n* = Bang degree at (t0, r); C_eps = K' ((2d/gamma) Gamma(2n*))^{4n*}";

  double log_t0 = 0.5 * std::log(eps) - std::log(K) - logNdd;
  if (log_t0 > 0.0) {
    rep.notes.push_back("t0 = exp(" + num(log_t0) + ") > 1 clamped to 1; the Bang sum starts at n = 1 either way");
    log_t0 = 0.0;
  }
  const double t0 = std::exp(log_t0);
  if (!(t0 > 0.0)) throw NumericalError("general_up_constant: t0 underflows");
  const BangDegree nstar = bang_degree(diagonal, t0, r);
  require_finite_bang(nstar, "general_up_constant");
  rep.notes.push_back("t0 = " + num(t0) + ", n* = " + nstar.to_string());
  double lv = std::log(Kprime);
  if (nstar.value > 0) {
    const auto gg = gamma_Gamma(diagonal, static_cast<std::size_t>(2 * nstar.value));
    lv += 4.0 * static_cast<double>(nstar.value) *
          (std::log(2.0 * d) - std::log(gamma) + gg.log_Gamma);
  }
  rep.set_log_value(lv);
  return rep;
}

ConstantReport specific_up_constant(const GSParams& g, double eps, double K)
{
  g.validate();
  if (!(eps > 0.0 && eps <= 1.0)) throw DomainError("specific_up_constant: eps must lie in (0, 1]");
  if (!(K > 0.0)) throw DomainError("specific_up_constant: K must be positive");
  ConstantReport rep;
  rep.name = "specific_up_constant";
  rep.inputs = {{"mu", num(g.mu)}, {"nu", num(g.nu)}, {"delta", num(g.delta)}, {"A", num(g.A)}, {"eps", num(eps)}};
  rep.fitted_constants = {{"K", K}};
  const Regime reg = g.regime();
  rep.regime = to_string(reg);
  if (reg == Regime::strict) {
    const double gap = 1.0 - g.mu - g.delta * g.nu;
    if (!(gap > 0.0)) throw DomainError("specific_up_constant: mu + delta nu >= 1 in the strict regime");
    rep.citations = "exp(K (1 - log eps + A^{2/(1 - mu - delta nu)}))";
    rep.set_log_value(K * (1.0 - std::log(eps) + std::pow(g.A, 2.0 / gap)));
  } else {
    rep.citations = "exp(K (1 - log eps + log A) e^{K A^2})";
    rep.set_log_value(K * (1.0 - std::log(eps) + std::log(g.A)) * std::exp(K * g.A * g.A));
  }
  return rep;
}

ShubinIndices shubin_indices(int m, int k, double s)
{
  if (m < 1 || k < 1) throw DomainError("shubin_indices: m and k must be >= 1");
  if (!(s > 0.0)) throw DomainError("shubin_indices: s must be positive");
  ShubinIndices out;
  const double md = m, kd = k;
  out.nu = std::max(1.0 / (2.0 * s * kd), md / (kd + md));
  out.mu = std::max(1.0 / (2.0 * s * md), kd / (kd + md));
  if (s > 1.0 / (2.0 * md)) {
    if (s >= (md + kd) / (2.0 * md * kd)) out.delta_star = 1.0;
    else out.delta_star = (kd / md) * (2.0 * s * md - 1.0);
  }
  return out;
}

double observability_exponent(const GSParams& g)
{
  g.validate();
  if (g.regime() == Regime::critical)
    throw DomainError("observability bound: critical regime delta = (1-mu)/nu is an open problem; no bound available");
  return 2.0 * g.r1 / (1.0 - g.mu - g.delta * g.nu);
}

ConstantReport observability_cost_bound(const GSParams& g, double T, double K)
{
  if (!(T > 0.0)) throw DomainError("observability_cost_bound: T must be positive");
  if (!(K > 0.0)) throw DomainError("observability_cost_bound: K must be positive");
  const double e = observability_exponent(g);
  ConstantReport rep;
  rep.name = "observability_cost_bound";
  rep.regime = "strict";
  rep.inputs = {{"mu", num(g.mu)}, {"nu", num(g.nu)}, {"delta", num(g.delta)}, {"r1", num(g.r1)}, {"T", num(T)}};
  rep.fitted_constants = {{"K", K}};
  rep.citations = "K exp(K / T^{2 r1 / (1 - mu - delta nu)})";
  rep.notes.push_back("exponent " + num(e));
  rep.set_log_value(std::log(K) + K * std::pow(T, -e));
  return rep;
}

double lr_q_lower_bound(double Kprime, double r1, double s)
{
  if (!(Kprime >= 1.0)) throw DomainError("Lebeau-Robbiano: K' must be >= 1");
  if (!(r1 > 0.0)) throw DomainError("Lebeau-Robbiano: r1 must be positive");
  if (!(s > 0.0 && s < 1.0)) throw DomainError("Lebeau-Robbiano: s must lie in (0, 1)");
  return std::max(std::pow(2.0 * Kprime / (2.0 * Kprime + 0.5), (1.0 - s) / (2.0 * r1)), 0.5);
}

LRSchedule lebeau_robbiano_schedule(double T, double q, double Kprime, double r1, double s)
{
  if (!(T > 0.0)) throw DomainError("Lebeau-Robbiano: T must be positive");
  LRSchedule out;
  out.q_min = lr_q_lower_bound(Kprime, r1, s);
  if (!(q >= out.q_min && q < 1.0))
    throw DomainError("Lebeau-Robbiano: q must lie in [" + num(out.q_min) + ", 1)");
  out.q = q;
  double Tk = T;
  double qk = 1.0;
  constexpr std::size_t kMaxTerms = 10'000'000;
  out.T_k.push_back(Tk);
  while (Tk > 1e-13 * T) {
    if (out.tau.size() >= kMaxTerms) throw NumericalError("Lebeau-Robbiano: schedule did not converge");
    const double tau = qk * (1.0 - q) * T;
    out.tau.push_back(tau);
    Tk = qk * q * T;  // closed form of T - sum_{j<=k} tau_j, no cancellation
    out.T_k.push_back(Tk);
    qk *= q;
  }
  // Kahan summation
  double s_ = 0.0, c = 0.0;
  for (double t : out.tau) {
    const double y = t - c;
    const double u = s_ + y;
    c = (u - s_) - y;
    s_ = u;
  }
  out.tau_sum = s_;
  out.log_final_constant = -std::log(1.0 - q) + 2.0 * Kprime / std::pow((1.0 - q) * T, 2.0 * r1 / (1.0 - s));
  return out;
}

std::size_t bernstein_theta_index(int d, double s, double r, int beta_total)
{
  if (d < 1) throw DomainError("bernstein index: d must be >= 1");
  if (!(s > 0.0 && s <= 1.0)) throw DomainError("bernstein index: s must lie in (0, 1]");
  if (!(r >= 0.0) || beta_total < 0) throw DomainError("bernstein index: r and |beta| must be >= 0");
  const double v = (r + 1.0 + beta_total + (2.0 - s) * (d + 1)) / (2.0 * s);
  return static_cast<std::size_t>(std::floor(v + 1e-12)) + 1;
}

ConstantReport bernstein_theta_bound(const WeightModel& w, int d, double s, double r, int beta_total, double D)
{
  if (!(D >= 1.0)) throw DomainError("bernstein_theta_bound: D must be >= 1");
  const std::size_t idx = bernstein_theta_index(d, s, r, beta_total);
  const HypothesisReport hyp = check_hypotheses(w, s, idx);
  if (!hyp.h1) throw DomainError("bernstein_theta_bound: (H1) fails; M_" + std::to_string(idx) + " is infinite");
  if (hyp.h2 == Certainty::failed) throw DomainError("bernstein_theta_bound: (H2) fails for this weight");
  const WeightSupremum ms = sequence_from_weight(w, idx);
  if (!ms.finite) throw DomainError("bernstein_theta_bound: M index infinite");

  ConstantReport rep;
  rep.name = "bernstein_theta_bound";
  rep.inputs = {{"weight", to_string(w.kind)}, {"d", std::to_string(d)}, {"s", num(s)}, {"r", num(r)},
                {"beta_total", std::to_string(beta_total)}};
  rep.fitted_constants = {{"D", D}};
  rep.citations = "D^{1 + r + |beta|} (M_{floor((r + 1 + |beta| + (2 - s)(d + 1)) / (2s)) + 1})^s";
  rep.notes.push_back("index " + std::to_string(idx));
  if (hyp.h2 == Certainty::undecided) rep.notes.push_back("(H2) undecided: " + hyp.h2_reason);
  rep.set_log_value((1.0 + r + beta_total) * std::log(D) + s * ms.log_value);
  return rep;
}

BernsteinDFit fit_bernstein_D(const WeightModel& w, int d, double s, int N, int max_order, int trials,
                              std::uint64_t seed)
{
  if (trials < 1) throw DomainError("fit_bernstein_D: trials must be >= 1");
  if (max_order < 0) throw DomainError("fit_bernstein_D: max_order must be >= 0");
  BernsteinDFit out;
  out.trials = trials;
  out.worst_beta = MultiIndex(d);
  double logD = 0.0;
  const auto betas = enumerate(d, max_order);
  for (int t = 0; t < trials; ++t) {
    const HermiteExpansion f = HermiteExpansion::random_unit(d, N, seed, static_cast<std::uint64_t>(t));
    const double lg = log_gs_theta_norm(f, w);
    for (const auto& beta : betas) {
      for (int r = 0; r + beta.total() <= max_order; ++r) {
        const std::size_t idx = bernstein_theta_index(d, s, r, beta.total());
        const double logM = sequence_from_weight(w, idx).log_value;
        const double lhs = std::log(bracket_seminorm(f, r, beta));
        const double need = (lhs - s * logM - lg) / (1.0 + r + beta.total());
        if (need > logD) {
          logD = need;
          out.worst_r = r;
          out.worst_beta = beta;
        }
      }
    }
  }
  out.D = std::exp(logD);
  return out;
}

InterpolationCheck interpolation_bound_check(const HermiteExpansion& f, double A, double mu, double nu,
                                             double delta, int P)
{
  if (!(mu > 0.0 && nu > 0.0 && mu + nu >= 1.0)) throw DomainError("interpolation check: need mu, nu > 0, mu + nu >= 1");
  if (!(delta >= 0.0 && delta <= 1.0)) throw DomainError("interpolation check: delta must lie in [0, 1]");
  const PairSeminorm ps = gs_pair_seminorm(f, A, mu, nu, P);
  if (!std::isfinite(ps.value)) throw NumericalError("interpolation check: hypothesis constant not finite");
  InterpolationCheck out;
  out.C = ps.value;
  out.argmax_beta = MultiIndex(f.dim());
  const double logbase = nu * std::log(8.0) + nu + std::log(A);
  for (const auto& beta : enumerate(f.dim(), P)) {
    const int b = beta.total();
    for (int p = 0; p <= P; ++p) {
      const double lhs = bracket_seminorm_real(f, delta * p, beta);
      const double logrhs = std::log(out.C) + (p + b) * logbase + delta * nu * std::lgamma(p + 1.0) +
                            mu * std::lgamma(b + 1.0);
      const double ratio = lhs * std::exp(-logrhs);
      if (ratio > out.max_ratio) {
        out.max_ratio = ratio;
        out.argmax_p = p;
        out.argmax_beta = beta;
      }
    }
  }
  return out;
}

}  // namespace thickobs
