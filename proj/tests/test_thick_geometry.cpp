#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "thickobs/error.hpp"
#include "thickobs/geometry.hpp"

using namespace thickobs;

namespace {

// |omega cap (x - 1, x + 1)| for the lattice {x mod 1 in [0, 1/2]}, by
// walking unit cells.
double lattice_measure(double x, double r)
{
  double m = 0.0;
  for (double k = std::floor(x - r) - 1; k <= x + r + 1; k += 1.0) {
    const double lo = std::max(k, x - r), hi = std::min(k + 0.5, x + r);
    if (hi > lo) m += hi - lo;
  }
  return m;
}

double poly_eval(const oracle::Poly& p, double x)
{
  long double s = 0.0L;
  for (std::size_t i = p.size(); i-- > 0;) s = s * x + p[i];
  return static_cast<double>(s * std::exp(-0.5L * x * x));
}

// label of a 1D ball with constant density by Simpson quadrature
struct OracleLabel
{
  bool good = true;
  int p = -1;
  int beta = -1;
};

OracleLabel oracle_label(const std::vector<oracle::Term>& f, double c, double r, double rho, double eps, int K0,
                         const std::function<double(int, int)>& logN, int P)
{
  std::vector<oracle::Poly> deriv(static_cast<std::size_t>(P + 1));
  for (int b = 0; b <= P; ++b) {
    oracle::Poly acc;
    for (const auto& t : f) {
      oracle::Poly q = oracle::hermite_poly(t.k[0]);
      for (int j = 0; j < b; ++j) q = oracle::differentiate(q);
      if (acc.size() < q.size()) acc.resize(q.size(), 0.0L);
      for (std::size_t i = 0; i < q.size(); ++i) acc[i] += t.c * q[i];
    }
    deriv[static_cast<std::size_t>(b)] = acc;
  }
  auto integral = [&](int b) {
    return oracle::simpson([&](double x) { const double v = poly_eval(deriv[static_cast<std::size_t>(b)], x); return v * v; },
                           c - r, c + r, 4000);
  };
  const double mass = integral(0);
  for (int p = 0; p <= P; ++p)
    for (int b = 0; b <= P; ++b) {
      const double lhs = std::pow(rho, 2 * p) * integral(b);
      const double rhs = std::pow(2.0, 2 * (p + b) + 2) * K0 * std::exp(2 * logN(p, b)) / eps * mass;
      if (lhs > rhs) return {false, p, b};
    }
  return {};
}

}  // namespace

TEST_CASE("densities")
{
  const auto c = DensityModel::constant(0.7);
  const double x0[1] = {123.0};
  CHECK(c(x0) == 0.7);
  CHECK(c.slowness() == 1.0);
  const auto p = DensityModel::power(0.9, 1.0);
  CHECK(p.L == doctest::Approx(0.9));
  CHECK(p.slowness() == doctest::Approx(10.0));
  CHECK_THROWS_AS(DensityModel::power(1.0, 1.0).validate(), DomainError);
  CHECK_THROWS_AS(DensityModel::constant(0.0).validate(), DomainError);
  CHECK_THROWS_AS(DensityModel::power(2.0, 1.5).validate(), DomainError);

  SUBCASE("sampled bounds and Lipschitz ratios")
  {
    for (const auto& rho : {DensityModel::power(0.5, 0.5), DensityModel::power(0.9, 1.0), DensityModel::power(3.0, 0.3)}) {
      double worst = 0.0;
      for (int i = -40; i <= 40; ++i)
        for (int j = -40; j <= 40; ++j) {
          const double x[2] = {0.37 * i, 0.41 * j};
          const double y[2] = {0.37 * i + 0.013 * j, 0.41 * j - 0.021 * i + 0.05};
          const double v = rho(x);
          const double br = std::sqrt(1.0 + x[0] * x[0] + x[1] * x[1]);
          CHECK(v >= rho.m * (1 - 1e-15));
          CHECK(v <= rho.R * std::pow(br, rho.delta) * (1 + 1e-15));
          const double dist = std::hypot(x[0] - y[0], x[1] - y[1]);
          worst = std::max(worst, std::abs(rho(x) - rho(y)) / dist);
        }
      CHECK(worst <= rho.L + 1e-9);
      CHECK(worst < 1.0);
    }
  }
}

TEST_CASE("regions")
{
  const auto lat = RegionModel::periodic_1d(1, 1.0, 0.0, 0.5);
  const double a[1] = {3.25}, b[1] = {-0.25}, z[1] = {0.0};
  CHECK(lat.contains(a));
  CHECK_FALSE(lat.contains(b));
  CHECK(lat.contains(z));
  CHECK(lat.measure_1d(-5.0, 5.0) == doctest::Approx(5.0));
  CHECK(lat.measure_1d(0.2, 1.7) == doctest::Approx(0.3 + 0.5));
  const auto comp = RegionModel::complement(lat);
  CHECK(comp.contains(b));
  CHECK(comp.measure_1d(0.2, 1.7) == doctest::Approx(1.5 - 0.8));

  const auto box = RegionModel::box_union(2, {{{0.0, 0.0}, {1.0, 2.0}}, {{0.5, 1.0}, {3.0, 1.5}}});
  const double in[2] = {2.0, 1.2}, out[2] = {2.0, 0.2};
  CHECK(box.contains(in));
  CHECK_FALSE(box.contains(out));
  const double p[2] = {0.75, 0.0};
  const auto sec = box.section(p, 1, -10.0, 10.0);
  REQUIRE(sec.size() == 1);
  CHECK(sec[0].lo == 0.0);
  CHECK(sec[0].hi == 2.0);

  const auto hs = RegionModel::half_space({1.0, 1.0}, 1.0);
  const double h1[2] = {1.0, 0.5}, h0[2] = {0.2, 0.2};
  CHECK(hs.contains(h1));
  CHECK_FALSE(hs.contains(h0));
  const auto hsec = hs.section(h0, 1, -5.0, 5.0);
  REQUIRE(hsec.size() == 1);
  CHECK(hsec[0].lo == doctest::Approx(0.8));
  CHECK(hsec[0].hi == 5.0);

  const auto ia = intersect({{0.0, 1.0}, {2.0, 3.0}}, {{0.5, 2.5}});
  REQUIRE(ia.size() == 2);
  CHECK(ia[0].lo == 0.5);
  CHECK(ia[1].hi == 2.5);
  CHECK_THROWS_AS(RegionModel::periodic_1d(1, 1.0, 0.6, 0.5), DomainError);
  CHECK_THROWS_AS(RegionModel::half_space({0.0, 0.0}, 1.0), DomainError);
}

TEST_CASE("thickness estimates")
{
  ThicknessProbe probe;
  probe.centers = ThicknessProbe::grid(1, -5.0, 5.0, 41);
  const auto one = DensityModel::constant(1.0);
  CHECK(thickness_estimate(RegionModel::all_space(1), one, probe).gamma_hat == 1.0);
  CHECK(thickness_estimate(RegionModel::empty(1), one, probe).gamma_hat == 0.0);

  const auto lat = RegionModel::periodic_1d(1, 1.0, 0.0, 0.5);
  SUBCASE("exact interval path")
  {
    const auto r = thickness_estimate(lat, one, probe);
    CHECK(r.exact);
    CHECK(r.gamma_hat == doctest::Approx(0.5).epsilon(1e-14));
    for (std::size_t k = 0; k < r.ratios.size(); ++k)
      CHECK(r.ratios[k] == doctest::Approx(lattice_measure(probe.centers[k], 1.0) / 2.0).epsilon(1e-14));
  }
  SUBCASE("Monte Carlo path")
  {
    probe.method = ThicknessProbe::Method::monte_carlo;
    const auto r = thickness_estimate(lat, one, probe);
    CHECK_FALSE(r.exact);
    CHECK(r.gamma_hat >= 0.48);
    CHECK(r.gamma_hat <= 0.52);
    CHECK(r.std_error > 0.0);
    CHECK(r.samples == 10000);
    probe.sampler = ThicknessProbe::Sampler::halton;
    const auto h = thickness_estimate(lat, one, probe);
    CHECK(h.gamma_hat == doctest::Approx(0.5).epsilon(0.01));
  }
  SUBCASE("deterministic given the seed")
  {
    probe.method = ThicknessProbe::Method::monte_carlo;
    probe.samples = 2000;
    const auto r1 = thickness_estimate(lat, one, probe);
    const auto r2 = thickness_estimate(lat, one, probe);
    CHECK(r1.ratios == r2.ratios);
    probe.seed += 1;
    CHECK(thickness_estimate(lat, one, probe).ratios != r1.ratios);
  }
  SUBCASE("monotone under inclusion")
  {
    ThicknessProbe p2;
    p2.centers = ThicknessProbe::grid(2, -3.0, 3.0, 7);
    p2.samples = 3000;
    const auto rho = DensityModel::power(0.5, 0.5);
    const auto small = RegionModel::box_union(2, {{{-1.0, -1.0}, {1.0, 1.0}}});
    const auto big = RegionModel::box_union(2, {{{-1.0, -1.0}, {1.0, 1.0}}, {{0.0, -4.0}, {4.0, 0.0}}});
    const auto rs = thickness_estimate(small, rho, p2);
    const auto rb = thickness_estimate(big, rho, p2);
    for (std::size_t k = 0; k < rs.ratios.size(); ++k) CHECK(rs.ratios[k] <= rb.ratios[k]);
    CHECK(rs.gamma_hat <= rb.gamma_hat);
    // a lattice band in 2D keeps close to half of every unit disk
    const auto band = RegionModel::periodic_1d(2, 1.0, 0.0, 0.5, 0);
    const auto rband = thickness_estimate(band, DensityModel::constant(1.0), p2);
    CHECK(rband.gamma_hat > 0.4);
  }
  SUBCASE("errors")
  {
    ThicknessProbe empty;
    CHECK_THROWS_AS(thickness_estimate(lat, one, empty), DomainError);
    CHECK_THROWS_AS(thickness_estimate(lat, DensityModel::constant(1e-310), probe), DomainError);
  }
}

TEST_CASE("covers")
{
  SUBCASE("unit density on [0, 10]")
  {
    const double lo[1] = {0.0}, hi[1] = {10.0};
    const auto c = build_cover(DensityModel::constant(1.0), lo, hi);
    CHECK(c.size() <= 11);
    CHECK(c.overlap_bound == 5);
    const auto rep = verify_overlap(c, 4001);
    CHECK(rep.uncovered == 0);
    CHECK(rep.max_multiplicity <= 2);
    CHECK(rep.within_bound);
    CHECK_NOTHROW(require_overlap(c, rep));
  }
  SUBCASE("power density on [-4, 4]^2")
  {
    const double lo[2] = {-4.0, -4.0}, hi[2] = {4.0, 4.0};
    const auto rho = DensityModel::power(0.5, 0.5);
    const auto c = build_cover(rho, lo, hi);
    const double C = 1.0 / (1.0 - 0.25);
    CHECK(c.overlap_bound == static_cast<std::uint64_t>(std::floor(std::pow(4 * C * C * C + 1, 2))));
    const auto rep = verify_overlap(c, 10 * static_cast<int>(std::round(8.0 / c.grid_step)) + 1);
    CHECK(rep.uncovered == 0);
    CHECK(rep.max_multiplicity <= c.overlap_bound);
  }
  SUBCASE("overlap bound arithmetic")
  {
    CHECK(overlap_bound(0.9, 2) == 16008001);
    CHECK(overlap_bound(0.0, 3) == 125);
    const double lo[2] = {-4.0, -4.0}, hi[2] = {4.0, 4.0};
    CHECK(build_cover(DensityModel::power(0.9, 1.0), lo, hi, 0.2).overlap_bound == 16008001);
  }
  SUBCASE("degenerate covers")
  {
    const double lo[1] = {1.0}, hi[1] = {0.0};
    CHECK(build_cover(DensityModel::constant(1.0), lo, hi).size() == 0);
    BallCover single;
    single.centers = {0.0};
    single.radii = {1.0};
    single.domain_lo = {-1.0};
    single.domain_hi = {1.0};
    single.overlap_bound = 5;
    CHECK(verify_overlap(single, 101).max_multiplicity == 1);
  }
  SUBCASE("duplicated centers violate the bound")
  {
    BallCover dup;
    dup.dim = 1;
    for (int i = 0; i < 6; ++i) {
      dup.centers.push_back(0.0);
      dup.radii.push_back(1.0);
    }
    dup.domain_lo = {-1.0};
    dup.domain_hi = {1.0};
    dup.overlap_bound = overlap_bound(0.0, 1);
    const auto rep = verify_overlap(dup, 101);
    CHECK(rep.max_multiplicity == 6);
    CHECK_FALSE(rep.within_bound);
    REQUIRE(rep.witness.size() == 1);
    CHECK(std::abs(rep.witness[0]) < 1.0);
    CHECK_THROWS_AS(require_overlap(dup, rep), NumericalError);
  }
  SUBCASE("CSV export")
  {
    const double lo[1] = {0.0}, hi[1] = {2.0};
    const auto csv = cover_to_csv(build_cover(DensityModel::constant(1.0), lo, hi));
    CHECK(csv.rfind("x0,radius\n", 0) == 0);
  }
}

TEST_CASE("good and bad balls")
{
  const auto one = DensityModel::constant(1.0);
  const double lo[1] = {-3.0}, hi[1] = {3.0};
  const auto cover = build_cover(one, lo, hi);

  SUBCASE("Gaussian with generous N is good everywhere")
  {
    const auto f = HermiteExpansion::basis(1, 0, MultiIndex{0});
    const LogDoubleSequence logN = [](int p, int q) {
      return (p + q) * std::log(2.0) + std::lgamma(p + 1.0) + std::lgamma(q + 1.0);
    };
    const auto cl = classify_balls(f, cover, one, 1.0, logN, 6);
    for (const auto& l : cl.labels) CHECK(l.good);
    CHECK(cl.bad_mass == 0.0);
  }
  SUBCASE("high mode with tight N at the origin")
  {
    BallCover origin;
    origin.centers = {0.0};
    origin.radii = {1.0};
    origin.domain_lo = {-1.0};
    origin.domain_hi = {1.0};
    origin.overlap_bound = overlap_bound(0.0, 1);
    const auto f = HermiteExpansion::basis(1, 40, MultiIndex{40});
    const LogDoubleSequence logN = [](int, int) { return 0.0; };
    const auto cl = classify_balls(f, origin, one, 1.0, logN, 6);
    const auto want = oracle_label({{1.0, {40}}}, 0.0, 1.0, 1.0, 1.0, 5, logN, 6);
    REQUIRE_FALSE(want.good);
    CHECK_FALSE(cl.labels[0].good);
    CHECK(cl.labels[0].witness_p == want.p);
    CHECK(cl.labels[0].witness_beta[0] == want.beta);
    CHECK(want.p == 0);
  }
  SUBCASE("labels agree with the quadrature oracle and partition the cover")
  {
    const LogDoubleSequence logN = [](int p, int q) { return 0.5 * (std::lgamma(p + 1.0) + std::lgamma(q + 1.0)); };
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      const auto f = HermiteExpansion::random_unit(1, 14, seed);
      std::vector<oracle::Term> terms;
      for (int k = 0; k <= 14; ++k) terms.push_back({f.coeffs()[static_cast<std::size_t>(k)], {k}});
      const auto cl = classify_balls(f, cover, one, 0.5, logN, 4);
      std::size_t good = 0, bad = 0;
      for (std::size_t k = 0; k < cover.size(); ++k) {
        const auto& l = cl.labels[k];
        (l.good ? good : bad) += 1;
        const auto want = oracle_label(terms, cover.centers[k], cover.radii[k], 1.0, 0.5, 5, logN, 4);
        CHECK(l.good == want.good);
        if (!want.good) {
          CHECK(l.witness_p == want.p);
          CHECK(l.witness_beta[0] == want.beta);
        }
      }
      CHECK(good + bad == cover.size());
    }
  }
  SUBCASE("(0, 0) test alone is vacuous")
  {
    const auto f = HermiteExpansion::random_unit(1, 10, 3);
    const auto cl = classify_balls(f, cover, one, 1.0, [](int, int) { return 0.0; }, 0);
    CHECK(cl.vacuous);
    for (const auto& l : cl.labels) CHECK(l.good);
  }
  SUBCASE("bad-ball mass bound")
  {
    const double lo2[2] = {-5.0, -5.0}, hi2[2] = {5.0, 5.0};
    const auto rho = DensityModel::power(0.5, 0.5);
    const auto cover2 = build_cover(rho, lo2, hi2, 0.1);
    const LogDoubleSequence logN = [](int p, int q) { return 0.5 * std::lgamma(p + 1.0) + 0.5 * std::lgamma(q + 1.0); };
    for (double eps : {1e-3, 1e-2, 0.1}) {
      const auto f = HermiteExpansion::random_unit(2, 8, 77);
      const auto cl = classify_balls(f, cover2, rho, eps, logN, 3);
      const double gs = gs_density_seminorm(f, rho, logN, 3);
      CAPTURE(eps);
      CHECK(cl.bad_mass <= 1.05 * eps * gs * gs);
    }
  }
  SUBCASE("domain checks and CSV")
  {
    const auto f = HermiteExpansion::random_unit(1, 4, 1);
    CHECK_THROWS_AS(classify_balls(f, cover, one, 2.0, [](int, int) { return 0.0; }, 2), DomainError);
    CHECK_THROWS_AS(classify_balls(f, cover, one, 0.0, [](int, int) { return 0.0; }, 2), DomainError);
    const auto cl = classify_balls(HermiteExpansion::basis(1, 40, MultiIndex{40}), cover, one, 1.0,
                                   [](int, int) { return 0.0; }, 2);
    const auto csv = classification_to_csv(cl);
    CHECK(csv.rfind("ball,label,witness_p,witness_beta\n", 0) == 0);
    CHECK(csv.find(",bad,0,") != std::string::npos);
  }
}
