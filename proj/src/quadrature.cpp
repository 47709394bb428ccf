#include "thickobs/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "thickobs/error.hpp"

namespace thickobs {
namespace {

constexpr double kBig = 1e200;

const double kLogC0 = -0.25 * std::log(std::numbers::pi);

}  // namespace

double hermite_eval(int k, double x)
{
  if (k < 0) throw DomainError("hermite_eval: negative degree");
  // p_j = phi_j(x) * exp(-logscale)
  double logscale = kLogC0 - 0.5 * x * x;
  double prev = 0.0;
  double cur = 1.0;
  for (int j = 0; j < k; ++j) {
    const double next = x * std::sqrt(2.0 / (j + 1)) * cur - std::sqrt(static_cast<double>(j) / (j + 1)) * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > kBig) {
      prev /= kBig;
      cur /= kBig;
      logscale += std::log(kBig);
    }
  }
  if (cur == 0.0) return 0.0;
  const double lg = logscale + std::log(std::abs(cur));
  return std::copysign(std::exp(lg), cur);
}

std::vector<double> hermite_eval_all(int nmax, double x)
{
  if (nmax < 0) throw DomainError("hermite_eval_all: negative degree");
  std::vector<double> out(static_cast<std::size_t>(nmax) + 1);
  std::vector<double> scale(out.size());
  double logscale = kLogC0 - 0.5 * x * x;
  double prev = 0.0;
  double cur = 1.0;
  out[0] = cur;
  scale[0] = logscale;
  for (int j = 0; j < nmax; ++j) {
    const double next = x * std::sqrt(2.0 / (j + 1)) * cur - std::sqrt(static_cast<double>(j) / (j + 1)) * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > kBig) {
      prev /= kBig;
      cur /= kBig;
      logscale += std::log(kBig);
    }
    out[j + 1] = cur;
    scale[j + 1] = logscale;
  }
  for (std::size_t j = 0; j < out.size(); ++j) {
    if (out[j] == 0.0) continue;
    out[j] = std::copysign(std::exp(scale[j] + std::log(std::abs(out[j]))), out[j]);
  }
  return out;
}

GaussHermiteRule gauss_hermite_rule(int n)
{
  if (n < 1 || n > 512) throw DomainError("gauss_hermite_rule: n must lie in [1, 512]");
  static std::mutex mu;
  static std::map<int, GaussHermiteRule> cache;
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(n); it != cache.end()) return it->second;
  }

  GaussHermiteRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  rule.scaled_weights.resize(n);
  if (n == 1) {
    rule.nodes[0] = 0.0;
    rule.weights[0] = std::sqrt(std::numbers::pi);
    rule.scaled_weights[0] = rule.weights[0];
  } else {
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sub(n - 1);
    for (int k = 1; k < n; ++k) sub[k - 1] = std::sqrt(0.5 * k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd& ev = es.eigenvalues();
    for (int i = 0; i < n; ++i) {
      double x = ev[i];
      for (int it = 0; it < 3; ++it) {
        const auto phi = hermite_eval_all(n, x);
        const double fn = phi[n];
        const double dfn = std::sqrt(2.0 * n) * phi[n - 1] - x * fn;
        if (dfn == 0.0) break;
        const double dx = fn / dfn;
        x -= dx;
        if (std::abs(dx) < 1e-16 * std::max(1.0, std::abs(x))) break;
      }
      const auto phi = hermite_eval_all(n - 1, x);
      double christoffel = 0.0;
      for (double v : phi) christoffel += v * v;
      rule.nodes[i] = x;
      rule.scaled_weights[i] = 1.0 / christoffel;
      rule.weights[i] = std::exp(-x * x) / christoffel;
    }
    // exact symmetry
    for (int i = 0; i < n / 2; ++i) {
      const int j = n - 1 - i;
      const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
      rule.nodes[i] = -x;
      rule.nodes[j] = x;
      const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
      const double sw = 0.5 * (rule.scaled_weights[i] + rule.scaled_weights[j]);
      rule.weights[i] = rule.weights[j] = w;
      rule.scaled_weights[i] = rule.scaled_weights[j] = sw;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  }

  std::lock_guard lock(mu);
  cache.emplace(n, rule);
  return rule;
}

namespace {

QuadratureRule legendre_reference(int n)
{
  static std::mutex mu;
  static std::map<int, QuadratureRule> cache;
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(n); it != cache.end()) return it->second;
  }
  QuadratureRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (x * p0 - p1) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  std::lock_guard lock(mu);
  cache.emplace(n, r);
  return r;
}

}  // namespace

QuadratureRule gauss_legendre_rule(int n, double a, double b)
{
  if (n < 1) throw DomainError("gauss_legendre_rule: n must be >= 1");
  QuadratureRule r = legendre_reference(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (int i = 0; i < n; ++i) {
    r.nodes[i] = mid + half * r.nodes[i];
    r.weights[i] *= half;
  }
  return r;
}

}  // namespace thickobs
