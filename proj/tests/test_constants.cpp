#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "thickobs/constants.hpp"
#include "thickobs/error.hpp"

using namespace thickobs;

TEST_CASE("report plumbing")
{
  ConstantReport r;
  r.set_log_value(2.0);
  REQUIRE(r.linear_value);
  CHECK(*r.linear_value == doctest::Approx(std::exp(2.0)).epsilon(1e-15));
  r.set_log_value(800.0);
  CHECK_FALSE(r.linear_value);
  CHECK(r.log_value == 800.0);
  CHECK_THROWS_AS(r.set_log_value(std::numeric_limits<double>::infinity()), NumericalError);
}

TEST_CASE("GS parameters")
{
  GSParams g;
  CHECK_NOTHROW(g.validate());
  CHECK(g.regime() == Regime::strict);
  g.delta = 1.0;
  CHECK(g.regime() == Regime::critical);
  g.delta = 1.0 - 1e-13;
  CHECK(g.regime() == Regime::critical);
  g.delta = 1.0 - 1e-9;
  CHECK(g.regime() == Regime::strict);
  g.delta = 1.1;
  CHECK_THROWS_AS(g.validate(), DomainError);
  GSParams bad;
  bad.mu = 0.3;
  bad.nu = 0.5;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = GSParams{};
  bad.A = 0.5;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = GSParams{};
  bad.t0 = 1.5;
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("propagation of smallness")
{
  SUBCASE("constant sequence with n* = 3")
  {
    const auto m = SequenceModel::constant_one();
    // budget d diam e = 3.5 puts exactly three unit ratios below it
    const double diam = 3.5 / std::numbers::e;
    const auto want = oracle::bang([](std::uint64_t) { return 1.0; }, 1.0, 3.5);
    REQUIRE(want);
    REQUIRE(*want == 3);
    const auto r = nsv_constants(m, 1.0, 1.0, 1, diam);
    CHECK(r.n_star.is_finite());
    CHECK(r.n_star.value == 3);
    CHECK(r.linf.log_value == doctest::Approx(6.0 * (std::log(4.0) + 4.0)).epsilon(1e-14));
    CHECK(r.l2.log_value ==
          doctest::Approx(std::log(2.0) + 12.0 * (std::log(2.0) + std::log(4.0) + 4.0)).epsilon(1e-14));
  }
  SUBCASE("Gamma bound for power factorials")
  {
    for (double s : {0.25, 0.5, 0.75, 1.0})
      for (std::size_t n : {2u, 10u, 100u, 1000u}) {
        const auto gg = gamma_Gamma(SequenceModel::power_factorial(1.0, s), n);
        CHECK(gg.gamma <= s + 1e-12);
        CHECK(gg.log_Gamma <= std::log(4.0) + 4.0 + 4.0 * s + 1e-12);
      }
  }
  SUBCASE("L2 factor decreases in gamma")
  {
    const auto m = SequenceModel::power_factorial(1.0, 1.0);
    double prev = std::numeric_limits<double>::infinity();
    for (double g : {0.1, 0.3, 0.5, 0.8, 1.0}) {
      const auto r = nsv_constants(m, 0.5, g, 2, 1.0);
      CHECK(r.l2.log_value < prev);
      prev = r.l2.log_value;
    }
  }
  SUBCASE("M_0 normalization leaves n* alone")
  {
    const auto a = nsv_constants(SequenceModel::power_factorial(1.0, 1.0), 0.5, 0.5, 1, 1.0);
    const auto b = nsv_constants(SequenceModel::explicit_log([] {
                                   std::vector<double> v;
                                   for (int p = 0; p <= 400; ++p) v.push_back(2.0 + oracle::log_factorial(p));
                                   return v;
                                 }()),
                                 0.5, 0.5, 1, 1.0);
    CHECK(a.n_star.value == b.n_star.value);
    CHECK(b.log_M0 == doctest::Approx(2.0));
    CHECK(b.adjusted_r == b.r);
    CHECK(b.linf.notes.size() == 2);
  }
  SUBCASE("non quasi-analytic sequences are refused")
  {
    CHECK_THROWS_AS(nsv_constants(SequenceModel::power_factorial(1.0, 2.0), 1.0, 1.0, 1, 1.0), DomainError);
    CHECK_THROWS_AS(nsv_constants(SequenceModel::constant_one(), 1.0, 0.0, 1, 1.0), DomainError);
  }
}

TEST_CASE("general uncertainty constant")
{
  const auto one = DensityModel::constant(1.0);
  const auto r = general_up_constant(SequenceModel::constant_one(), one, 1.0, 1, 1.0);
  CHECK(r.log_value == 0.0);
  REQUIRE(r.linear_value);
  CHECK(*r.linear_value == 1.0);
  REQUIRE(r.fitted_constants.size() == 3);

  const auto diag = SequenceModel::power_factorial(1.0, 1.0);
  double prev = -1.0;
  for (double eps = 1.0; eps > 1e-12; eps *= 0.5) {
    const double v = general_up_constant(diag, one, 0.5, 1, eps, 1.0, 1.0, 3.0).log_value;
    CHECK(v >= prev);
    prev = v;
  }
  double prevg = std::numeric_limits<double>::infinity();
  for (double g : {0.2, 0.4, 0.6, 1.0}) {
    const double v = general_up_constant(diag, one, g, 1, 1e-4, 1.0, 1.0, 3.0).log_value;
    CHECK(v <= prevg);
    prevg = v;
  }
  CHECK_THROWS_AS(general_up_constant(diag, one, 0.5, 1, 1.5), DomainError);
  CHECK_THROWS_AS(general_up_constant(diag, one, 0.5, 1, 0.5, 0.5), DomainError);
  CHECK_THROWS_AS(general_up_constant(SequenceModel::power_factorial(1.0, 2.0), one, 0.5, 1, 0.5, 1.0, 1.0, 3.0), DomainError);
}

TEST_CASE("specific uncertainty constant")
{
  GSParams g;
  const auto strict = specific_up_constant(g, 1.0);
  CHECK(strict.regime == "strict");
  CHECK(strict.log_value == doctest::Approx(2.0).epsilon(1e-15));
  g.delta = 1.0;
  const auto crit = specific_up_constant(g, 1.0);
  CHECK(crit.regime == "critical");
  CHECK(crit.log_value == doctest::Approx(std::numbers::e).epsilon(1e-15));
  g.delta = 1.0 - 1e-14;
  CHECK(specific_up_constant(g, 1.0).regime == "critical");
  g.delta = 0.0;
  double prev = 0.0;
  for (double eps : {1.0, 0.5, 0.1, 1e-3, 1e-9}) {
    const double v = specific_up_constant(g, eps).log_value;
    CHECK(v > prev);
    prev = v;
  }
  CHECK_THROWS_AS(specific_up_constant(g, 0.0), DomainError);
  CHECK_THROWS_AS(specific_up_constant(g, 2.0), DomainError);
}

TEST_CASE("Shubin indices")
{
  const auto a = shubin_indices(1, 1, 1.0);
  CHECK(a.nu == 0.5);
  CHECK(a.mu == 0.5);
  REQUIRE(a.delta_star);
  CHECK(*a.delta_star == 1.0);
  const auto b = shubin_indices(1, 1, 0.75);
  REQUIRE(b.delta_star);
  CHECK(*b.delta_star == doctest::Approx(0.5).epsilon(1e-15));
  const auto c = shubin_indices(1, 2, 1.0);
  CHECK(c.nu == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(c.mu == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK_FALSE(shubin_indices(1, 1, 0.5).delta_star);
  CHECK_FALSE(shubin_indices(2, 1, 0.2).delta_star);
  CHECK_THROWS_AS(shubin_indices(0, 1, 1.0), DomainError);

  for (int m = 1; m <= 4; ++m)
    for (int k = 1; k <= 4; ++k) {
      double prev = -1.0;
      for (double s = 0.3; s <= 2.0 + 1e-12; s += 0.1) {
        const auto ix = shubin_indices(m, k, s);
        CHECK(ix.mu + ix.nu >= 1.0 - 1e-15);
        if (ix.delta_star) {
          CHECK(*ix.delta_star >= prev);
          CHECK(*ix.delta_star <= 1.0 + 1e-15);
          prev = *ix.delta_star;
        }
      }
      // both branches meet at s = (m + k)/(2mk)
      const double s0 = (m + k) / (2.0 * m * k);
      if (s0 > 1.0 / (2.0 * m)) {
        const auto below = shubin_indices(m, k, s0 * (1 - 1e-12));
        REQUIRE(below.delta_star);
        CHECK(*below.delta_star == doctest::Approx(1.0).epsilon(1e-10));
      }
    }
}

TEST_CASE("observability cost bound")
{
  GSParams g;
  CHECK(observability_exponent(g) == 4.0);
  g.r1 = 2.0;
  CHECK(observability_exponent(g) == 8.0);
  g.r1 = 1.0;
  CHECK(observability_cost_bound(g, 1e6, 2.0).log_value == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(observability_cost_bound(g, 1.0, 1.0).log_value == doctest::Approx(1.0));
  CHECK(observability_cost_bound(g, 0.5, 1.0).log_value == doctest::Approx(16.0));
  double prev = std::numeric_limits<double>::infinity();
  for (double T = 0.1; T < 5.0; T *= 1.3) {
    const double v = observability_cost_bound(g, T, 3.0).log_value;
    CHECK(v < prev);
    prev = v;
  }
  g.delta = 1.0;
  CHECK_THROWS_AS(observability_cost_bound(g, 1.0), DomainError);
  g.delta = 0.0;
  CHECK_THROWS_AS(observability_cost_bound(g, 0.0), DomainError);
}

TEST_CASE("Lebeau-Robbiano schedule")
{
  CHECK(std::abs(lr_q_lower_bound(1.0, 1.0, 0.5) - 0.94574160900317583) <= 1e-12);
  CHECK(lr_q_lower_bound(1.0, 0.01, 0.5) == 0.5);

  for (double T : {0.1, 1.0, 7.0})
    for (double q : {0.95, 0.99}) {
      const auto s = lebeau_robbiano_schedule(T, q, 1.0, 1.0, 0.5);
      CHECK(std::abs(s.tau_sum - T) <= 1e-12 * T);
      REQUIRE(s.T_k.size() == s.tau.size() + 1);
      for (std::size_t k = 0; k < s.tau.size(); ++k) {
        CHECK(s.tau[k] == doctest::Approx(std::pow(q, k) * (1 - q) * T).epsilon(1e-12));
        CHECK(s.T_k[k + 1] == doctest::Approx(s.T_k[k] - s.tau[k]).epsilon(1e-9).scale(T));
      }
      CHECK(s.log_final_constant ==
            doctest::Approx(-std::log(1 - q) + 2.0 / std::pow((1 - q) * T, 4.0)).epsilon(1e-12));
    }
  // partial sums of the first 200 terms against the geometric formula
  const auto s = lebeau_robbiano_schedule(1.0, 0.95, 1.0, 1.0, 0.5);
  double part = 0.0;
  for (std::size_t k = 0; k < 200; ++k) part += s.tau[k];
  CHECK(part == doctest::Approx(1.0 - std::pow(0.95, 200)).epsilon(1e-13));

  // (1 - q) exp(-2K' tau^{-2 r1/(1-s)}) increases with tau
  double prev = 0.0;
  for (double tau = 0.05; tau < 3.0; tau *= 1.2) {
    const double f = 0.05 * std::exp(-2.0 * std::pow(tau, -4.0));
    CHECK(f >= prev);
    prev = f;
  }

  CHECK_THROWS_WITH_AS(lebeau_robbiano_schedule(1.0, 0.9, 1.0, 1.0, 0.5), doctest::Contains("0.9457"), DomainError);
  CHECK_THROWS_AS(lebeau_robbiano_schedule(1.0, 1.0, 1.0, 1.0, 0.5), DomainError);
  CHECK_THROWS_AS(lebeau_robbiano_schedule(1.0, 0.99, 1.0, 1.0, 1.0), DomainError);
}

TEST_CASE("Bernstein weight bound")
{
  CHECK(bernstein_theta_index(1, 1.0, 0.0, 0) == 2);
  CHECK(bernstein_theta_index(2, 0.5, 1.0, 2) == 9);
  const auto r = bernstein_theta_bound(WeightModel::linear(), 1, 1.0, 0.0, 0);
  CHECK(r.log_value == doctest::Approx(2.0 * (std::log(2.0) - 1.0)).epsilon(1e-10));
  const auto r2 = bernstein_theta_bound(WeightModel::linear(), 1, 1.0, 0.0, 0, 2.0);
  CHECK(r2.log_value - r.log_value == doctest::Approx(std::log(2.0)));
  CHECK_THROWS_AS(bernstein_theta_bound(WeightModel::linear(), 1, 1.0, 0.0, 0, 0.5), DomainError);

  const auto a = fit_bernstein_D(WeightModel::linear(), 1, 1.0, 10, 4, 20, 11);
  const auto b = fit_bernstein_D(WeightModel::linear(), 1, 1.0, 10, 4, 20, 12);
  CHECK(std::isfinite(a.D));
  CHECK(a.D >= 1.0);
  CHECK(std::abs(a.D - b.D) <= 0.2 * std::max(a.D, b.D));
  CHECK(a.worst_r + a.worst_beta.total() <= 4);
}

TEST_CASE("interpolation check")
{
  const auto phi0 = HermiteExpansion::basis(1, 0, MultiIndex{0});
  const auto r = interpolation_bound_check(phi0, 1.0, 0.5, 0.5, 1.0, 4);
  CHECK(r.max_ratio <= 1.0 + 1e-9);
  CHECK(r.C > 0.0);
  const auto z = interpolation_bound_check(phi0, 1.0, 0.5, 0.5, 0.0, 4);
  CHECK(z.max_ratio <= 1.0 + 1e-9);
  CHECK(z.argmax_p == 0);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto f = HermiteExpansion::random_unit(2, 6, seed);
    for (double delta : {0.0, 0.5, 1.0}) CHECK(interpolation_bound_check(f, 2.0, 0.5, 0.5, delta, 3).max_ratio <= 1.0 + 1e-9);
  }
  CHECK_THROWS_AS(interpolation_bound_check(phi0, 1.0, 0.3, 0.5, 0.0, 2), DomainError);
}
