#include <algorithm>
#include <cmath>
#include <numbers>

#include "thickobs/csv.hpp"
#include "thickobs/error.hpp"
#include "thickobs/geometry.hpp"
#include "thickobs/parallel.hpp"
#include "thickobs/quadrature.hpp"

namespace thickobs {
namespace {

struct BallRule
{
  std::vector<double> points;  // packed row-wise
  std::vector<double> weights;
};

// Gauss-Legendre on the interval (1D), polar Gauss-Legendre x trapezoid (2D),
// spherical Gauss-Legendre x Gauss-Legendre x trapezoid (3D).
BallRule ball_rule(std::span<const double> c, double r, int n)
{
  BallRule b;
  const int d = static_cast<int>(c.size());
  if (d == 1) {
    const auto gl = gauss_legendre_rule(n, c[0] - r, c[0] + r);
    b.points = gl.nodes;
    b.weights = gl.weights;
    return b;
  }
  const auto rad = gauss_legendre_rule(n, 0.0, r);
  const int m = 2 * n;
  const double dphi = 2.0 * std::numbers::pi / m;
  if (d == 2) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) {
        const double ph = j * dphi;
        b.points.push_back(c[0] + rad.nodes[i] * std::cos(ph));
        b.points.push_back(c[1] + rad.nodes[i] * std::sin(ph));
        b.weights.push_back(rad.weights[i] * rad.nodes[i] * dphi);
      }
    return b;
  }
  const auto ct = gauss_legendre_rule(n, -1.0, 1.0);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const double st = std::sqrt(1.0 - ct.nodes[k] * ct.nodes[k]);
      for (int j = 0; j < m; ++j) {
        const double ph = j * dphi;
        const double rr = rad.nodes[i];
        b.points.push_back(c[0] + rr * st * std::cos(ph));
        b.points.push_back(c[1] + rr * st * std::sin(ph));
        b.points.push_back(c[2] + rr * ct.nodes[k]);
        b.weights.push_back(rad.weights[i] * rr * rr * ct.weights[k] * dphi);
      }
    }
  return b;
}

}  // namespace

Classification classify_balls(const HermiteExpansion& f, const BallCover& cover, const DensityModel& rho,
                              double eps, const LogDoubleSequence& logN, int P)
{
  rho.validate();
  if (f.dim() != cover.dim) throw DomainError("classify_balls: expansion and cover dimensions differ");
  if (!(eps > 0.0)) throw DomainError("classify_balls: eps must be positive");
  if (P < 0) throw DomainError("classify_balls: cutoff P must be >= 0");
  if (std::log(eps) > 2.0 * logN(0, 0) + 1e-12) throw DomainError("classify_balls: eps exceeds N_{0,0}^2");

  Classification out;
  out.order = P;
  out.vacuous = P == 0;
  out.K0 = cover.overlap_bound;
  const int d = f.dim();
  const auto du = static_cast<std::size_t>(d);

  const auto betas = enumerate(d, P);
  std::vector<HermiteExpansion> derivs;
  derivs.reserve(betas.size());
  for (const auto& b : betas) derivs.push_back(apply_monomial_derivative(f, MultiIndex(d), b));

  const int nq = std::max(48, f.level() + P + 24);
  const double logK0 = std::log(static_cast<double>(out.K0));
  out.labels.resize(cover.size());

  parallel_for(cover.size(), [&](std::size_t k) {
    const BallRule rule = ball_rule(cover.center(k), cover.radii[k], nq);
    const std::size_t np = rule.weights.size();
    std::vector<double> rho_pt(np);
    for (std::size_t i = 0; i < np; ++i) rho_pt[i] = rho(std::span<const double>(rule.points.data() + i * du, du));
    std::vector<std::vector<double>> vals(derivs.size());
    for (std::size_t j = 0; j < derivs.size(); ++j) vals[j] = derivs[j].evaluate(rule.points);

    double mass = 0.0;
    for (std::size_t i = 0; i < np; ++i) mass += rule.weights[i] * vals[0][i] * vals[0][i];
    BallLabel lab;
    lab.mass = mass;
    lab.witness_beta = MultiIndex(d);
    for (int p = 0; p <= P && lab.good; ++p) {
      for (std::size_t j = 0; j < betas.size(); ++j) {
        const int b = betas[j].total();
        double lhs = 0.0;
        for (std::size_t i = 0; i < np; ++i) {
          const double v = std::pow(rho_pt[i], p) * vals[j][i];
          lhs += rule.weights[i] * v * v;
        }
        const double log_factor = -std::log(eps) + (2.0 * (p + b) + d + 1) * std::numbers::ln2 + logK0 +
                                  2.0 * logN(p, b);
        if (lhs > std::exp(log_factor) * mass) {
          lab.good = false;
          lab.witness_p = p;
          lab.witness_beta = betas[j];
          break;
        }
      }
    }
    out.labels[k] = lab;
  });

  for (const auto& l : out.labels)
    if (!l.good) out.bad_mass += l.mass;
  return out;
}

std::string classification_to_csv(const Classification& c)
{
  CsvBuilder csv({"ball", "label", "witness_p", "witness_beta"});
  for (std::size_t k = 0; k < c.labels.size(); ++k) {
    const auto& l = c.labels[k];
    csv.cell(k).cell(l.good ? "good" : "bad");
    if (l.good) {
      csv.cell("").cell("");
    } else {
      std::string b;
      for (int i = 0; i < l.witness_beta.d; ++i) b += (i ? ";" : "") + std::to_string(l.witness_beta[i]);
      csv.cell(l.witness_p).cell(b);
    }
    csv.end_row();
  }
  return csv.str();
}

double gs_density_seminorm(const HermiteExpansion& f, const DensityModel& rho, const LogDoubleSequence& logN, int P)
{
  rho.validate();
  if (P < 0) throw DomainError("gs_density_seminorm: P must be >= 0");
  const int d = f.dim();
  const auto du = static_cast<std::size_t>(d);
  double best = 0.0;
  const auto betas = enumerate(d, P);

  if (rho.kind == DensityModel::Kind::constant) {
    for (const auto& b : betas) {
      const double nb = apply_monomial_derivative(f, MultiIndex(d), b).norm();
      for (int p = 0; p <= P; ++p)
        best = std::max(best, std::exp(p * std::log(rho.m) - logN(p, b.total())) * nb);
    }
    return best;
  }

  const int n = std::min(512, f.level() + 2 * P + 64);
  const auto gh = gauss_hermite_rule(n);
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(n);
  std::vector<double> pts(total * du), w(total), rp(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    double ww = 1.0;
    for (std::size_t i = 0; i < du; ++i) {
      const std::size_t j = rem % static_cast<std::size_t>(n);
      rem /= static_cast<std::size_t>(n);
      pts[idx * du + i] = gh.nodes[j];
      ww *= gh.scaled_weights[j];
    }
    w[idx] = ww;
    rp[idx] = rho(std::span<const double>(pts.data() + idx * du, du));
  }
  for (const auto& b : betas) {
    const auto vals = apply_monomial_derivative(f, MultiIndex(d), b).evaluate(pts);
    for (int p = 0; p <= P; ++p) {
      double s = 0.0;
      for (std::size_t i = 0; i < total; ++i) {
        const double v = std::pow(rp[i], p) * vals[i];
        s += w[i] * v * v;
      }
      best = std::max(best, std::sqrt(s) * std::exp(-logN(p, b.total())));
    }
  }
  return best;
}

}  // namespace thickobs
