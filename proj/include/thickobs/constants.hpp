#pragma once

// Closed-form calculators for the uncertainty-principle and control-cost
// constants. Everything is returned in log-space. Constants that are only
// known to exist (K, K', r, D) are explicit inputs defaulting to 1 and are
// echoed in every report under fitted_constants.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "thickobs/geometry.hpp"
#include "thickobs/hermite.hpp"
#include "thickobs/sequences.hpp"

namespace thickobs {

enum class Regime { strict, critical };
std::string to_string(Regime r);

struct GSParams
{
  double mu = 0.5;
  double nu = 0.5;
  double delta = 0.0;
  double A = 1.0;
  // smoothing estimate C^{1+|a|+|b|} / t^{r1(|a|+|b|) + r2} for 0 < t <= t0
  double C = 1.0;
  double r1 = 1.0;
  double r2 = 0.0;
  double t0 = 1.0;

  void validate() const;
  /// (1 - mu) / nu
  double delta_max() const { return (1.0 - mu) / nu; }
  /// Critical when delta is within 1e-12 (relative) of (1 - mu) / nu.
  Regime regime() const;
};

struct ConstantReport
{
  std::string name;
  std::vector<std::pair<std::string, std::string>> inputs;
  double log_value = 0.0;
  std::optional<double> linear_value;  // present when the value is below 1e300
  std::string regime = "n/a";
  std::string citations;  // formula evaluated
  std::vector<std::pair<std::string, double>> fitted_constants;
  std::vector<std::string> notes;

  void set_log_value(double v);
};

struct NsvResult
{
  BangDegree n_star;
  double r = 0.0;           // Bang budget d * diam * e
  double adjusted_r = 0.0;  // after normalizing M_0 to 1 (ratios are unchanged)
  double log_M0 = 0.0;
  double gamma_2n = 0.0;    // gamma_M(2 n*) (0 when n* = 0)
  double log_Gamma_2n = 0.0;
  ConstantReport linf;      // ((d/gamma) Gamma_M(2n*))^{2n*}
  ConstantReport l2;        // (2/gamma) ((2d/gamma) Gamma_M(2n*))^{4n*}
};

/// Propagation-of-smallness factors. Refuses when the Bang degree is not finite.
NsvResult nsv_constants(const SequenceModel& m, double t, double gamma, int d, double diam);

/// C_eps = K' ((2d/gamma) Gamma(2n*))^{4n*}, n* = Bang degree of the diagonal
/// N_{p,p} at t0 = eps^{1/2} / (K N_{d,d}) with budget r.
ConstantReport general_up_constant(const SequenceModel& diagonal, const DensityModel& rho, double gamma, int d,
                                   double eps, double K = 1.0, double Kprime = 1.0, double r = 1.0);

/// Upper bound on log C_{eps,A}: strict K(1 - log eps + A^{2/(1-mu-delta nu)}),
/// critical K(1 - log eps + log A) e^{K A^2}.
ConstantReport specific_up_constant(const GSParams& g, double eps, double K = 1.0);

struct ShubinIndices
{
  double nu = 0.0;
  double mu = 0.0;
  std::optional<double> delta_star;  // undefined for s <= 1/(2m)
};

ShubinIndices shubin_indices(int m, int k, double s);

/// 2 r1 / (1 - mu - delta nu); strict regime only.
double observability_exponent(const GSParams& g);

/// log K + K T^{-2 r1/(1 - mu - delta nu)}; the critical regime is refused.
ConstantReport observability_cost_bound(const GSParams& g, double T, double K = 1.0);

struct LRSchedule
{
  double q = 0.0;
  double q_min = 0.0;
  std::vector<double> tau;  // tau_k = q^k (1 - q) T
  std::vector<double> T_k;  // T_0 = T, T_{k+1} = T_k - tau_k
  double tau_sum = 0.0;
  double log_final_constant = 0.0;  // -log(1-q) + 2K'/((1-q)T)^{2r1/(1-s)}
};

/// max((2K'/(2K' + 1/2))^{(1-s)/(2 r1)}, 1/2)
double lr_q_lower_bound(double Kprime, double r1, double s);

/// Geometric time schedule; terms are generated until T_k <= 1e-13 T.
LRSchedule lebeau_robbiano_schedule(double T, double q, double Kprime, double r1, double s);

/// floor((r + 1 + beta + (2 - s)(d + 1)) / (2s)) + 1
std::size_t bernstein_theta_index(int d, double s, double r, int beta_total);

/// log of D^{1+r+beta} (M_index)^s.
ConstantReport bernstein_theta_bound(const WeightModel& w, int d, double s, double r, int beta_total,
                                     double D = 1.0);

struct BernsteinDFit
{
  double D = 1.0;  // smallest D >= 1 consistent with every trial
  int trials = 0;
  int worst_r = 0;
  MultiIndex worst_beta;
};

/// Fits the smallest D over seeded random f in E_N, integer r and |beta| with
/// r + |beta| <= max_order.
BernsteinDFit fit_bernstein_D(const WeightModel& w, int d, double s, int N, int max_order, int trials,
                              std::uint64_t seed);

struct InterpolationCheck
{
  double max_ratio = 0.0;
  double C = 0.0;  // truncated gs_pair_seminorm
  int argmax_p = 0;
  MultiIndex argmax_beta;
};

/// max over p, |beta| <= P of ||<x>^{delta p} d^beta f|| / (C (8^nu e^nu A)^{p+|beta|} (p!)^{delta nu} (|beta|!)^mu).
InterpolationCheck interpolation_bound_check(const HermiteExpansion& f, double A, double mu, double nu,
                                             double delta, int P);

}  // namespace thickobs
