#include "thickobs/hermite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "thickobs/csv.hpp"
#include "thickobs/error.hpp"
#include "thickobs/kernels.hpp"
#include "thickobs/quadrature.hpp"
#include "thickobs/random.hpp"

namespace thickobs {
namespace {

constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

void check_dim(int d)
{
  if (d < 1 || d > kMaxDim) throw DomainError("Hermite expansions support 1 <= d <= 3");
}

void check_same(const HermiteExpansion& f, const MultiIndex& m, const char* what)
{
  if (m.d != f.dim()) throw DomainError(std::string(what) + ": multi-index dimension mismatch");
}

// phi_k(x_i) for k = 0..nmax at all xs, row-major by k.
std::vector<double> hermite_rows(std::span<const double> xs, int nmax)
{
  std::vector<double> out(static_cast<std::size_t>(nmax + 1) * xs.size());
  const bool in_range =
      std::all_of(xs.begin(), xs.end(), [](double x) { return std::abs(x) <= kernels::kTableRange; });
  if (in_range) {
    kernels::hermite_table(xs, nmax, out);
  } else {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const auto v = hermite_eval_all(nmax, xs[i]);
      for (int k = 0; k <= nmax; ++k) out[static_cast<std::size_t>(k) * xs.size() + i] = v[static_cast<std::size_t>(k)];
    }
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

HermiteExpansion::HermiteExpansion(int d, int N) : d_(d), N_(N)
{
  check_dim(d);
  if (N < 0) throw DomainError("Hermite expansion level must be >= 0");
  c_.assign(basis_size(d, N), 0.0);
}

HermiteExpansion HermiteExpansion::basis(int d, int N, const MultiIndex& alpha)
{
  if (alpha.d != d) throw DomainError("basis: multi-index dimension mismatch");
  if (alpha.total() > N) throw DomainError("basis: |alpha| exceeds the level");
  HermiteExpansion f(d, N);
  f.c_[rank(alpha)] = 1.0;
  return f;
}

HermiteExpansion HermiteExpansion::from_coeffs(int d, int N, std::vector<double> coeffs)
{
  HermiteExpansion f(d, N);
  if (coeffs.size() != f.c_.size())
    throw DomainError("from_coeffs: expected " + std::to_string(f.c_.size()) + " coefficients");
  for (double v : coeffs)
    if (!std::isfinite(v)) throw DomainError("from_coeffs: non-finite coefficient");
  f.c_ = std::move(coeffs);
  return f;
}

HermiteExpansion HermiteExpansion::random_unit(int d, int N, std::uint64_t seed, std::uint64_t stream)
{
  HermiteExpansion f(d, N);
  Rng rng(seed, stream);
  double s = 0.0;
  for (double& v : f.c_) {
    v = rng.normal();
    s += v * v;
  }
  const double inv = 1.0 / std::sqrt(s);
  for (double& v : f.c_) v *= inv;
  return f;
}

double HermiteExpansion::operator[](const MultiIndex& alpha) const
{
  check_same(*this, alpha, "coefficient lookup");
  if (alpha.total() > N_) return 0.0;
  return c_[rank(alpha)];
}

double& HermiteExpansion::at(const MultiIndex& alpha)
{
  check_same(*this, alpha, "coefficient lookup");
  if (alpha.total() > N_) throw DomainError("coefficient index beyond the expansion level");
  return c_[rank(alpha)];
}

double HermiteExpansion::norm_squared() const
{
  double s = 0.0;
  for (double v : c_) s += v * v;
  return s;
}

double HermiteExpansion::norm() const { return std::sqrt(norm_squared()); }

HermiteExpansion HermiteExpansion::with_level(int N) const
{
  HermiteExpansion g(d_, N);
  const std::size_t n = std::min(g.c_.size(), c_.size());
  std::copy_n(c_.begin(), n, g.c_.begin());
  return g;
}

std::vector<double> HermiteExpansion::evaluate(std::span<const double> points) const
{
  if (points.size() % static_cast<std::size_t>(d_) != 0) throw DomainError("evaluate: point array size");
  const std::size_t n = points.size() / static_cast<std::size_t>(d_);
  std::vector<double> out(n, 0.0);
  if (n == 0) return out;
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(d_));
  for (int a = 0; a < d_; ++a) {
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = points[i * static_cast<std::size_t>(d_) + static_cast<std::size_t>(a)];
    rows[static_cast<std::size_t>(a)] = hermite_rows(xs, N_);
  }
  auto row = [&](int axis, int k) {
    return std::span<const double>(rows[static_cast<std::size_t>(axis)].data() + static_cast<std::size_t>(k) * n, n);
  };
  std::vector<double> tmp(d_ == 3 ? n : 0);
  for (std::size_t r = 0; r < c_.size(); ++r) {
    const double c = c_[r];
    if (c == 0.0) continue;
    const MultiIndex a = unrank(d_, r);
    if (d_ == 1) {
      kernels::axpy(c, row(0, a[0]), out);
    } else if (d_ == 2) {
      kernels::axpy_prod(c, row(0, a[0]), row(1, a[1]), out);
    } else {
      std::fill(tmp.begin(), tmp.end(), 0.0);
      kernels::axpy_prod(1.0, row(0, a[0]), row(1, a[1]), tmp);
      kernels::axpy_prod(c, tmp, row(2, a[2]), out);
    }
  }
  return out;
}

HermiteExpansion& HermiteExpansion::operator+=(const HermiteExpansion& o)
{
  if (o.d_ != d_) throw DomainError("expansion dimension mismatch");
  if (o.N_ > N_) *this = with_level(o.N_);
  for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

HermiteExpansion& HermiteExpansion::operator*=(double a)
{
  for (double& v : c_) v *= a;
  return *this;
}

// ---------------------------------------------------------------------------

HermiteExpansion apply_x(const HermiteExpansion& f, int axis)
{
  const int d = f.dim();
  if (axis < 0 || axis >= d) throw DomainError("apply_x: axis out of range");
  HermiteExpansion g(d, f.level() + 1);
  auto& out = g.coeffs();
  const auto& c = f.coeffs();
  for (std::size_t r = 0; r < c.size(); ++r) {
    if (c[r] == 0.0) continue;
    MultiIndex a = unrank(d, r);
    const int k = a[axis];
    a[axis] = k + 1;
    out[rank(a)] += c[r] * std::sqrt(0.5 * (k + 1));
    if (k > 0) {
      a[axis] = k - 1;
      out[rank(a)] += c[r] * std::sqrt(0.5 * k);
    }
  }
  return g;
}

HermiteExpansion apply_d(const HermiteExpansion& f, int axis)
{
  const int d = f.dim();
  if (axis < 0 || axis >= d) throw DomainError("apply_d: axis out of range");
  HermiteExpansion g(d, f.level() + 1);
  auto& out = g.coeffs();
  const auto& c = f.coeffs();
  for (std::size_t r = 0; r < c.size(); ++r) {
    if (c[r] == 0.0) continue;
    MultiIndex a = unrank(d, r);
    const int k = a[axis];
    a[axis] = k + 1;
    out[rank(a)] -= c[r] * std::sqrt(0.5 * (k + 1));
    if (k > 0) {
      a[axis] = k - 1;
      out[rank(a)] += c[r] * std::sqrt(0.5 * k);
    }
  }
  return g;
}

HermiteExpansion apply_monomial_derivative(const HermiteExpansion& f, const MultiIndex& alpha,
                                           const MultiIndex& beta)
{
  check_same(f, alpha, "x^alpha");
  check_same(f, beta, "d^beta");
  HermiteExpansion g = f;
  for (int i = 0; i < f.dim(); ++i)
    for (int j = 0; j < beta[i]; ++j) g = apply_d(g, i);
  for (int i = 0; i < f.dim(); ++i)
    for (int j = 0; j < alpha[i]; ++j) g = apply_x(g, i);
  return g;
}

namespace {

// x^2 (sign = +1) or d^2 (sign = -1) along one axis, from the closed-form
// second-order bands: off-diagonals ((k+1)(k+2))^{1/2}/2, ((k-1)k)^{1/2}/2 and
// diagonal sign (2k+1)/2. Both operators produce bitwise identical
// off-diagonal values, so -d^2 + x^2 cancels them exactly.
HermiteExpansion apply_second_order(const HermiteExpansion& f, int axis, double sign)
{
  const int d = f.dim();
  HermiteExpansion g(d, f.level() + 2);
  auto& out = g.coeffs();
  const auto& c = f.coeffs();
  for (std::size_t r = 0; r < c.size(); ++r) {
    if (c[r] == 0.0) continue;
    MultiIndex a = unrank(d, r);
    const int k = a[axis];
    out[r] += c[r] * sign * 0.5 * (2.0 * k + 1.0);
    a[axis] = k + 2;
    out[rank(a)] += c[r] * 0.5 * std::sqrt((k + 1.0) * (k + 2.0));
    if (k >= 2) {
      a[axis] = k - 2;
      out[rank(a)] += c[r] * 0.5 * std::sqrt((k - 1.0) * k);
    }
  }
  return g;
}

}  // namespace

HermiteExpansion apply_harmonic(const HermiteExpansion& f)
{
  HermiteExpansion g(f.dim(), f.level() + 2);
  for (int i = 0; i < f.dim(); ++i) {
    g += apply_second_order(f, i, 1.0);
    g += apply_second_order(f, i, -1.0) *= -1.0;
  }
  return g;
}

// ---------------------------------------------------------------------------

LadderOperators::LadderOperators(int d, int level, int margin) : d_(d), level_(level), margin_(margin)
{
  check_dim(d);
  if (level < 0 || margin < 0) throw DomainError("LadderOperators: level and margin must be >= 0");
  const int top = level + margin;
  indices_ = enumerate(d, top);
  up_.assign(static_cast<std::size_t>(d), std::vector<std::size_t>(indices_.size(), npos));
  down_.assign(static_cast<std::size_t>(d), std::vector<std::size_t>(indices_.size(), npos));
  for (std::size_t r = 0; r < indices_.size(); ++r) {
    for (int ax = 0; ax < d; ++ax) {
      MultiIndex a = indices_[r];
      if (a.total() < top) {
        a[ax] += 1;
        up_[static_cast<std::size_t>(ax)][r] = rank(a);
        a[ax] -= 1;
      }
      if (a[ax] > 0) {
        a[ax] -= 1;
        down_[static_cast<std::size_t>(ax)][r] = rank(a);
      }
    }
  }
}

HermiteExpansion LadderOperators::apply(const HermiteExpansion& f, const MultiIndex& alpha,
                                        const MultiIndex& beta) const
{
  if (f.dim() != d_) throw DomainError("LadderOperators: dimension mismatch");
  check_same(f, alpha, "x^alpha");
  check_same(f, beta, "d^beta");
  if (f.level() > level_) throw PaddingError("LadderOperators: expansion level exceeds the operator base level");
  const int order = alpha.total() + beta.total();
  if (order > margin_)
    throw PaddingError("LadderOperators: order " + std::to_string(order) + " exceeds padding margin " +
                       std::to_string(margin_) + "; rebuild with margin >= " + std::to_string(order));

  std::vector<double> cur = f.coeffs();
  int lvl = f.level();
  auto step = [&](int axis, bool derivative) {
    std::vector<double> next(basis_size(d_, lvl + 1), 0.0);
    const auto& up = up_[static_cast<std::size_t>(axis)];
    const auto& dn = down_[static_cast<std::size_t>(axis)];
    for (std::size_t r = 0; r < cur.size(); ++r) {
      const double c = cur[r];
      if (c == 0.0) continue;
      const int k = indices_[r][axis];
      const double u = c * std::sqrt(0.5 * (k + 1));
      next[up[r]] += derivative ? -u : u;
      if (k > 0) next[dn[r]] += c * std::sqrt(0.5 * k);
    }
    cur.swap(next);
    ++lvl;
  };
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < beta[i]; ++j) step(i, true);
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < alpha[i]; ++j) step(i, false);
  return HermiteExpansion::from_coeffs(d_, lvl, std::move(cur));
}

std::string LadderOperators::band_csv(int axis, char which) const
{
  if (axis < 0 || axis >= d_) throw DomainError("band_csv: axis out of range");
  if (which != 'X' && which != 'D') throw DomainError("band_csv: operator must be 'X' or 'D'");
  CsvBuilder csv({"row", "col", "value"});
  const auto& up = up_[static_cast<std::size_t>(axis)];
  const auto& dn = down_[static_cast<std::size_t>(axis)];
  // column r holds the image of basis vector r
  std::vector<std::tuple<std::size_t, std::size_t, double>> entries;
  for (std::size_t r = 0; r < indices_.size(); ++r) {
    const int k = indices_[r][axis];
    if (dn[r] != npos) entries.emplace_back(dn[r], r, std::sqrt(0.5 * k));
    if (up[r] != npos) entries.emplace_back(up[r], r, (which == 'D' ? -1.0 : 1.0) * std::sqrt(0.5 * (k + 1)));
  }
  std::sort(entries.begin(), entries.end());
  for (const auto& [i, j, v] : entries) {
    csv.cell(i).cell(j).cell(v);
    csv.end_row();
  }
  return csv.str();
}

// ---------------------------------------------------------------------------

double weighted_seminorm(const HermiteExpansion& f, const MultiIndex& alpha, const MultiIndex& beta)
{
  return apply_monomial_derivative(f, alpha, beta).norm();
}

double weighted_seminorm(const LadderOperators& ops, const HermiteExpansion& f, const MultiIndex& alpha,
                         const MultiIndex& beta)
{
  return ops.apply(f, alpha, beta).norm();
}

double bernstein_factor(int N, int n)
{
  return std::exp(0.5 * n * std::log(2.0) + 0.5 * (std::lgamma(N + n + 1.0) - std::lgamma(N + 1.0)));
}

BernsteinResult bernstein_check(int d, int N, const MultiIndex& alpha, const MultiIndex& beta, int trials,
                                std::uint64_t seed)
{
  if (trials < 1) throw DomainError("bernstein_check: trials must be >= 1");
  const int n = alpha.total() + beta.total();
  const LadderOperators ops(d, N, n);
  const double bound = bernstein_factor(N, n);
  BernsteinResult res;
  res.trials = trials;
  for (int t = 0; t < trials; ++t) {
    const HermiteExpansion f = HermiteExpansion::random_unit(d, N, seed, static_cast<std::uint64_t>(t));
    const double ratio = ops.apply(f, alpha, beta).norm() / (bound * f.norm());
    res.max_ratio = std::max(res.max_ratio, ratio);
  }
  return res;
}

double log_gs_theta_norm(const HermiteExpansion& f, const WeightModel& w)
{
  w.validate();
  const auto& c = f.coeffs();
  std::vector<double> terms;
  terms.reserve(c.size());
  std::vector<double> theta(static_cast<std::size_t>(f.level()) + 1);
  for (int n = 0; n <= f.level(); ++n) theta[static_cast<std::size_t>(n)] = w(static_cast<double>(n));
  for (std::size_t r = 0; r < c.size(); ++r) {
    if (c[r] == 0.0) continue;
    const int n = unrank(f.dim(), r).total();
    terms.push_back(2.0 * theta[static_cast<std::size_t>(n)] + 2.0 * std::log(std::abs(c[r])));
  }
  if (terms.empty()) return -std::numeric_limits<double>::infinity();
  const double mx = *std::max_element(terms.begin(), terms.end());
  double s = 0.0;
  for (double t : terms) s += std::exp(t - mx);
  return 0.5 * (mx + std::log(s));
}

double gs_theta_norm(const HermiteExpansion& f, const WeightModel& w) { return std::exp(log_gs_theta_norm(f, w)); }

double bracket_seminorm(const HermiteExpansion& f, int p, const MultiIndex& beta)
{
  if (p < 0) throw DomainError("bracket_seminorm: p must be >= 0");
  const HermiteExpansion g = apply_monomial_derivative(f, MultiIndex(f.dim()), beta);
  const double lp = std::lgamma(p + 1.0);
  double s = 0.0;
  for (const MultiIndex& gam : enumerate(f.dim(), p)) {
    double lw = lp - std::lgamma(p - gam.total() + 1.0);
    for (int i = 0; i < gam.d; ++i) lw -= std::lgamma(gam[i] + 1.0);
    const double nrm = apply_monomial_derivative(g, gam, MultiIndex(f.dim())).norm_squared();
    s += std::exp(lw) * nrm;
  }
  return std::sqrt(s);
}

double bracket_seminorm_real(const HermiteExpansion& f, double q, const MultiIndex& beta)
{
  if (!(q >= 0.0)) throw DomainError("bracket_seminorm_real: q must be >= 0");
  if (q == std::floor(q) && q < 64) return bracket_seminorm(f, static_cast<int>(q), beta);
  const HermiteExpansion g = apply_monomial_derivative(f, MultiIndex(f.dim()), beta);
  const int n = std::min(512, g.level() + 2 * static_cast<int>(std::ceil(q)) + 48);
  const GaussHermiteRule gh = gauss_hermite_rule(n);
  const int d = f.dim();
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(n);
  std::vector<double> pts(total * static_cast<std::size_t>(d));
  std::vector<double> wts(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    double w = 1.0;
    for (int i = 0; i < d; ++i) {
      const std::size_t j = rem % static_cast<std::size_t>(n);
      rem /= static_cast<std::size_t>(n);
      pts[idx * static_cast<std::size_t>(d) + static_cast<std::size_t>(i)] = gh.nodes[j];
      w *= gh.scaled_weights[j];
    }
    wts[idx] = w;
  }
  const auto vals = g.evaluate(pts);
  double s = 0.0;
  for (std::size_t idx = 0; idx < total; ++idx) {
    double r2 = 1.0;
    for (int i = 0; i < d; ++i) {
      const double x = pts[idx * static_cast<std::size_t>(d) + static_cast<std::size_t>(i)];
      r2 += x * x;
    }
    s += wts[idx] * std::pow(r2, q) * vals[idx] * vals[idx];
  }
  return std::sqrt(s);
}

PairSeminorm gs_pair_seminorm(const HermiteExpansion& f, double A, double mu, double nu, int P)
{
  if (!(A >= 1.0)) throw DomainError("gs_pair_seminorm: A must be >= 1");
  if (P < 0) throw DomainError("gs_pair_seminorm: P must be >= 0");
  PairSeminorm out;
  out.order = P;
  out.argmax_beta = MultiIndex(f.dim());
  const double logA = std::log(A);
  for (const MultiIndex& beta : enumerate(f.dim(), P)) {
    const int b = beta.total();
    for (int p = 0; p <= P; ++p) {
      const double num = bracket_seminorm(f, p, beta);
      const double logden = (p + b) * logA + nu * std::lgamma(p + 1.0) + mu * std::lgamma(b + 1.0);
      const double v = num * std::exp(-logden);
      if (v > out.value) {
        out.value = v;
        out.argmax_p = p;
        out.argmax_beta = beta;
      }
    }
  }
  return out;
}

HermiteExpansion project(const HermiteExpansion& f, int Nprime)
{
  if (Nprime < 0 || Nprime > f.level()) throw DomainError("project: N' must lie in [0, level]");
  return f.with_level(Nprime);
}

std::string expansion_to_csv(const HermiteExpansion& f)
{
  std::vector<std::string> header;
  for (int i = 0; i < f.dim(); ++i) header.push_back("a" + std::to_string(i));
  header.push_back("real");
  header.push_back("imag");
  CsvBuilder csv(header);
  for (std::size_t r = 0; r < f.size(); ++r) {
    const MultiIndex a = unrank(f.dim(), r);
    for (int i = 0; i < f.dim(); ++i) csv.cell(a[i]);
    csv.cell(f.coeffs()[r]).cell(0.0);
    csv.end_row();
  }
  return csv.str();
}

HermiteExpansion expansion_from_csv(const std::string& text)
{
  const auto rows = parse_csv(text);
  if (rows.empty()) throw DomainError("expansion CSV: empty input");
  const auto& header = rows[0];
  if (header.size() < 3 || header[header.size() - 2] != "real" || header.back() != "imag")
    throw DomainError("expansion CSV: header must be a0,...,real,imag");
  const int d = static_cast<int>(header.size()) - 2;
  check_dim(d);
  struct Entry { MultiIndex a; double v; };
  std::vector<Entry> entries;
  int N = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() != header.size()) throw DomainError("expansion CSV: ragged row " + std::to_string(i));
    MultiIndex a(d);
    for (int j = 0; j < d; ++j) {
      const double v = parse_double(row[static_cast<std::size_t>(j)]);
      if (v < 0 || v != std::floor(v)) throw DomainError("expansion CSV: bad multi-index entry");
      a[j] = static_cast<int>(v);
    }
    const double re = parse_double(row[static_cast<std::size_t>(d)]);
    const double im = parse_double(row[static_cast<std::size_t>(d) + 1]);
    if (im != 0.0) throw DomainError("expansion CSV: complex coefficients are not supported");
    N = std::max(N, a.total());
    entries.push_back({a, re});
  }
  HermiteExpansion f(d, N);
  for (const auto& e : entries) f.at(e.a) = e.v;
  return f;
}

}  // namespace thickobs
