#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <sstream>

#include "thickobs/csv.hpp"
#include "thickobs/error.hpp"
#include "thickobs/geometry.hpp"
#include "thickobs/parallel.hpp"
#include "thickobs/random.hpp"

namespace thickobs {
namespace {

std::atomic<unsigned> g_threads{0};

// Map a point of the unit cube [0,1)^d to the ball B(c, r), uniformly.
void to_ball(int d, const double* u, std::span<const double> c, double r, double* out)
{
  switch (d) {
    case 1:
      out[0] = c[0] + r * (2.0 * u[0] - 1.0);
      break;
    case 2: {
      const double rad = r * std::sqrt(u[0]);
      const double th = 2.0 * std::numbers::pi * u[1];
      out[0] = c[0] + rad * std::cos(th);
      out[1] = c[1] + rad * std::sin(th);
      break;
    }
    default: {
      const double rad = r * std::cbrt(u[0]);
      const double ct = 2.0 * u[1] - 1.0;
      const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
      const double ph = 2.0 * std::numbers::pi * u[2];
      out[0] = c[0] + rad * st * std::cos(ph);
      out[1] = c[1] + rad * st * std::sin(ph);
      out[2] = c[2] + rad * ct;
      break;
    }
  }
}

double dist2(std::span<const double> a, std::span<const double> b)
{
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

// Regular grid with `n[i]` points on axis i; calls f(point) in lexicographic order.
template <class F>
void for_grid(std::span<const double> lo, std::span<const double> hi, const std::vector<std::size_t>& n, F&& f)
{
  const std::size_t d = lo.size();
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> p(d);
  std::size_t total = 1;
  for (auto k : n) total *= k;
  for (std::size_t it = 0; it < total; ++it) {
    for (std::size_t i = 0; i < d; ++i)
      p[i] = n[i] == 1 ? lo[i] : lo[i] + (hi[i] - lo[i]) * static_cast<double>(idx[i]) / static_cast<double>(n[i] - 1);
    f(std::span<const double>(p));
    for (std::size_t i = d; i-- > 0;) {
      if (++idx[i] < n[i]) break;
      idx[i] = 0;
    }
  }
}

}  // namespace

void set_thread_count(unsigned n) { g_threads.store(n); }

unsigned thread_count()
{
  const unsigned n = g_threads.load();
  if (n) return n;
  return std::max(1u, std::thread::hardware_concurrency());
}

// ---------------------------------------------------------------------------

std::vector<double> ThicknessProbe::grid(int d, double lo, double hi, int count)
{
  if (count < 1) throw DomainError("probe grid: count must be >= 1");
  std::vector<double> l(static_cast<std::size_t>(d), lo), h(static_cast<std::size_t>(d), hi);
  std::vector<std::size_t> n(static_cast<std::size_t>(d), static_cast<std::size_t>(count));
  std::vector<double> out;
  for_grid(l, h, n, [&](std::span<const double> p) { out.insert(out.end(), p.begin(), p.end()); });
  return out;
}

ThicknessResult thickness_estimate(const RegionModel& omega, const DensityModel& rho, const ThicknessProbe& probe)
{
  rho.validate();
  const int d = omega.dim();
  const auto du = static_cast<std::size_t>(d);
  if (probe.centers.empty() || probe.centers.size() % du != 0)
    throw DomainError("thickness probe: centers empty or not a multiple of the dimension");
  const std::size_t nc = probe.centers.size() / du;

  const bool trivial = omega.structure() == RegionModel::Structure::all_space ||
                       omega.structure() == RegionModel::Structure::empty;
  bool exact = false;
  switch (probe.method) {
    case ThicknessProbe::Method::automatic:
      exact = trivial || d == 1;
      break;
    case ThicknessProbe::Method::exact:
      if (!(trivial || d == 1)) throw DomainError("thickness: exact measure only available in 1D");
      exact = true;
      break;
    case ThicknessProbe::Method::monte_carlo:
      exact = false;
      break;
  }
  if (!exact && probe.samples == 0) throw DomainError("thickness probe: zero Monte Carlo samples");

  ThicknessResult res;
  res.exact = exact;
  res.samples = exact ? 0 : probe.samples;
  res.seed = probe.seed;
  res.ratios.assign(nc, 0.0);
  res.radii.assign(nc, 0.0);

  parallel_for(nc, [&](std::size_t k) {
    std::span<const double> c(probe.centers.data() + k * du, du);
    const double r = rho(c);
    if (!(r > 1e-300) || !std::isfinite(r)) throw DomainError("thickness: zero-radius ball at probe center");
    res.radii[k] = r;
    if (exact) {
      if (omega.structure() == RegionModel::Structure::all_space) res.ratios[k] = 1.0;
      else if (omega.structure() == RegionModel::Structure::empty) res.ratios[k] = 0.0;
      else res.ratios[k] = omega.measure_1d(c[0] - r, c[0] + r) / (2.0 * r);
      return;
    }
    Rng rng(probe.seed, k);
    double u[3], x[3];
    std::size_t hits = 0;
    for (std::size_t i = 0; i < probe.samples; ++i) {
      if (probe.sampler == ThicknessProbe::Sampler::halton) {
        static constexpr unsigned kBases[3] = {2, 3, 5};
        for (int j = 0; j < d; ++j) u[j] = radical_inverse(i + 1, kBases[j]);
      } else {
        for (int j = 0; j < d; ++j) u[j] = rng.uniform();
      }
      to_ball(d, u, c, r, x);
      if (omega.contains(std::span<const double>(x, du))) ++hits;
    }
    res.ratios[k] = static_cast<double>(hits) / static_cast<double>(probe.samples);
  });

  res.gamma_hat = res.ratios[0];
  res.worst_center = 0;
  for (std::size_t k = 1; k < nc; ++k)
    if (res.ratios[k] < res.gamma_hat) {
      res.gamma_hat = res.ratios[k];
      res.worst_center = k;
    }
  if (!exact) {
    const double p = res.gamma_hat;
    res.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(probe.samples));
  }
  return res;
}

// ---------------------------------------------------------------------------

std::uint64_t overlap_bound(double L, int d)
{
  if (!(L >= 0.0 && L < 1.0)) throw DomainError("overlap bound: L must lie in [0, 1)");
  const double C = 1.0 / (1.0 - L);
  const double v = std::pow(4.0 * C * C * C + 1.0, d);
  if (!(v < 1.8e19)) throw DomainError("overlap bound overflows 64 bits");
  return static_cast<std::uint64_t>(std::floor(v * (1.0 + 1e-12)));
}

BallCover build_cover(const DensityModel& rho, std::span<const double> lo, std::span<const double> hi,
                      double grid_step)
{
  rho.validate();
  if (lo.size() != hi.size() || lo.empty() || lo.size() > 3) throw DomainError("build_cover: bad domain box");
  const int d = static_cast<int>(lo.size());
  BallCover cover;
  cover.dim = d;
  cover.domain_lo.assign(lo.begin(), lo.end());
  cover.domain_hi.assign(hi.begin(), hi.end());
  cover.lipschitz = rho.L;
  cover.overlap_bound = overlap_bound(rho.L, d);
  for (int i = 0; i < d; ++i)
    if (hi[static_cast<std::size_t>(i)] < lo[static_cast<std::size_t>(i)]) return cover;

  double h = grid_step > 0.0 ? grid_step : rho.m / 4.0;
  if (!(h * std::sqrt(static_cast<double>(d)) / 2.0 < rho.m))
    throw DomainError("build_cover: grid step too coarse for the density lower bound");
  std::vector<std::size_t> n(static_cast<std::size_t>(d));
  double total = 1.0;
  for (int i = 0; i < d; ++i) {
    const auto k = static_cast<std::size_t>(i);
    n[k] = static_cast<std::size_t>(std::ceil((hi[k] - lo[k]) / h)) + 1;
    total *= static_cast<double>(n[k]);
  }
  if (total > 2e7) throw DomainError("build_cover: scan grid too large; increase grid_step");
  // actual spacing per axis is <= h
  double hmax = 0.0;
  for (int i = 0; i < d; ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (n[k] > 1) hmax = std::max(hmax, (hi[k] - lo[k]) / static_cast<double>(n[k] - 1));
  }
  cover.grid_step = hmax;
  const double margin = hmax * std::sqrt(static_cast<double>(d)) / 2.0;

  for_grid(lo, hi, n, [&](std::span<const double> p) {
    for (std::size_t k = cover.size(); k-- > 0;) {
      const double r = cover.radii[k] - margin;
      if (r > 0.0 && dist2(p, cover.center(k)) < r * r) return;
    }
    const double r = rho(p);
    if (!(r > margin)) throw DomainError("build_cover: density below the scan resolution");
    cover.centers.insert(cover.centers.end(), p.begin(), p.end());
    cover.radii.push_back(r);
  });
  return cover;
}

std::string cover_to_csv(const BallCover& c)
{
  std::vector<std::string> header;
  for (int i = 0; i < c.dim; ++i) header.push_back("x" + std::to_string(i));
  header.push_back("radius");
  CsvBuilder csv(header);
  for (std::size_t k = 0; k < c.size(); ++k) {
    for (double v : c.center(k)) csv.cell(v);
    csv.cell(c.radii[k]);
    csv.end_row();
  }
  return csv.str();
}

OverlapReport verify_overlap(const BallCover& c, std::span<const double> points)
{
  const auto du = static_cast<std::size_t>(c.dim);
  if (points.size() % du != 0) throw DomainError("verify_overlap: point array size");
  OverlapReport rep;
  const std::size_t np = points.size() / du;
  for (std::size_t i = 0; i < np; ++i) {
    std::span<const double> p(points.data() + i * du, du);
    std::uint64_t m = 0;
    for (std::size_t k = 0; k < c.size(); ++k)
      if (dist2(p, c.center(k)) < c.radii[k] * c.radii[k]) ++m;
    if (m == 0) ++rep.uncovered;
    if (m > rep.max_multiplicity) {
      rep.max_multiplicity = m;
      rep.witness.assign(p.begin(), p.end());
    }
  }
  rep.within_bound = rep.max_multiplicity <= c.overlap_bound;
  return rep;
}

OverlapReport verify_overlap(const BallCover& c, int per_axis)
{
  if (per_axis < 1) throw DomainError("verify_overlap: per_axis must be >= 1");
  std::vector<std::size_t> n(static_cast<std::size_t>(c.dim), static_cast<std::size_t>(per_axis));
  std::vector<double> pts;
  for_grid(c.domain_lo, c.domain_hi, n, [&](std::span<const double> p) { pts.insert(pts.end(), p.begin(), p.end()); });
  return verify_overlap(c, pts);
}

void require_overlap(const BallCover& c, const OverlapReport& r)
{
  if (r.within_bound) return;
  std::ostringstream os;
  os << "overlap bound violated: multiplicity " << r.max_multiplicity << " > " << c.overlap_bound << " at (";
  for (std::size_t i = 0; i < r.witness.size(); ++i) os << (i ? "," : "") << format_double(r.witness[i]);
  os << ")";
  throw NumericalError(os.str());
}

}  // namespace thickobs
