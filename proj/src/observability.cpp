#include "thickobs/observability.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "thickobs/csv.hpp"
#include "thickobs/error.hpp"
#include "thickobs/kernels.hpp"
#include "thickobs/parallel.hpp"
#include "thickobs/quadrature.hpp"

namespace thickobs {
namespace {

using SpMat = Eigen::SparseMatrix<double>;

constexpr double kClip = -1e-8;

// Second-order band operators along one axis on the padded index set:
// x^2 phi_k = ((k+1)(k+2))^{1/2}/2 phi_{k+2} + (2k+1)/2 phi_k + (k(k-1))^{1/2}/2 phi_{k-2}
// d^2 phi_k = ((k+1)(k+2))^{1/2}/2 phi_{k+2} - (2k+1)/2 phi_k + (k(k-1))^{1/2}/2 phi_{k-2}
SpMat second_order(const std::vector<MultiIndex>& idx, int top, int axis, bool derivative)
{
  const auto n = static_cast<Eigen::Index>(idx.size());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(idx.size() * 3);
  for (Eigen::Index c = 0; c < n; ++c) {
    MultiIndex a = idx[static_cast<std::size_t>(c)];
    const int k = a[axis];
    const double diag = 0.5 * (2 * k + 1);
    trip.emplace_back(c, c, derivative ? -diag : diag);
    if (a.total() + 2 <= top) {
      a[axis] = k + 2;
      trip.emplace_back(static_cast<Eigen::Index>(rank(a)), c, 0.5 * std::sqrt(static_cast<double>(k + 1) * (k + 2)));
      a[axis] = k;
    }
    if (k >= 2) {
      a[axis] = k - 2;
      trip.emplace_back(static_cast<Eigen::Index>(rank(a)), c, 0.5 * std::sqrt(static_cast<double>(k) * (k - 1)));
    }
  }
  SpMat m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

SpMat sparse_power(const SpMat& a, int p)
{
  SpMat r = a;
  for (int i = 1; i < p; ++i) r = (r * a).pruned();
  return r;
}

// Quadrature nodes for composite Gauss-Legendre over a union of intervals,
// panels no wider than `width`.
void composite_nodes(const std::vector<Interval>& ivs, double width, int n, std::vector<double>& x,
                     std::vector<double>& w)
{
  x.clear();
  w.clear();
  for (const auto& iv : ivs) {
    const int panels = std::max(1, static_cast<int>(std::ceil(iv.length() / width)));
    const double h = iv.length() / panels;
    for (int p = 0; p < panels; ++p) {
      const auto r = gauss_legendre_rule(n, iv.lo + p * h, iv.lo + (p + 1) * h);
      x.insert(x.end(), r.nodes.begin(), r.nodes.end());
      w.insert(w.end(), r.weights.begin(), r.weights.end());
    }
  }
}

// (nmax+1)^2 matrix of int_{ivs} phi_i phi_j.
Eigen::MatrixXd gram_1d(const std::vector<Interval>& ivs, int nmax, double width, int n)
{
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nmax + 1, nmax + 1);
  std::vector<double> x, w;
  composite_nodes(ivs, width, n, x, w);
  if (x.empty()) return M;
  const std::size_t nq = x.size();
  std::vector<double> table(static_cast<std::size_t>(nmax + 1) * nq);
  kernels::hermite_table(x, nmax, table);
  for (std::size_t k = 0; k <= static_cast<std::size_t>(nmax); ++k)
    for (std::size_t q = 0; q < nq; ++q) table[k * nq + q] *= std::sqrt(w[q]);
  for (int i = 0; i <= nmax; ++i) {
    std::span<const double> ri(table.data() + static_cast<std::size_t>(i) * nq, nq);
    for (int j = 0; j <= i; ++j) {
      std::span<const double> rj(table.data() + static_cast<std::size_t>(j) * nq, nq);
      const double v = kernels::dot(ri, rj);
      M(i, j) = v;
      M(j, i) = v;
    }
  }
  return M;
}

bool sections_piecewise_constant(const RegionModel& r)
{
  switch (r.structure()) {
    case RegionModel::Structure::half_space: {
      int nz = 0;
      for (double v : r.normal()) nz += v != 0.0;
      return nz <= 1;
    }
    case RegionModel::Structure::complement:
      return sections_piecewise_constant(r.inner());
    default:
      return true;
  }
}

bool same_intervals(const std::vector<Interval>& a, const std::vector<Interval>& b)
{
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].lo != b[i].lo || a[i].hi != b[i].hi) return false;
  return true;
}

// M[(a,b),(a',b')] += A(a,a') G(b,b') over the 2D basis.
void kron_accumulate(Eigen::MatrixXd& M, const std::vector<MultiIndex>& basis, const Eigen::MatrixXd& A,
                     const Eigen::MatrixXd& G)
{
  const auto n = static_cast<Eigen::Index>(basis.size());
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& p = basis[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < n; ++c) {
      const auto& q = basis[static_cast<std::size_t>(c)];
      M(r, c) += A(p[0], q[0]) * G(p[1], q[1]);
    }
  }
}

Eigen::MatrixXd gramian_at(const RegionModel& omega, int d, int N, double X, double width, int nodes)
{
  if (d == 1) {
    const double p = 0.0;
    return gram_1d(omega.section(std::span<const double>(&p, 1), 0, -X, X), N, width, nodes);
  }
  const auto basis = enumerate(2, N);
  const auto nb = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nb, nb);

  std::vector<double> cuts = {-X};
  for (double b : omega.breakpoints(0, -X, X)) cuts.push_back(b);
  cuts.push_back(X);

  if (sections_piecewise_constant(omega)) {
    // group x-pieces with identical y-sections
    struct Group { std::vector<Interval> ysec; std::vector<Interval> xs; };
    std::vector<Group> groups;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double pt[2] = {0.5 * (cuts[i] + cuts[i + 1]), 0.0};
      auto ysec = omega.section(pt, 1, -X, X);
      if (ysec.empty()) continue;
      auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& g) { return same_intervals(g.ysec, ysec); });
      if (it == groups.end()) groups.push_back({std::move(ysec), {{cuts[i], cuts[i + 1]}}});
      else it->xs.push_back({cuts[i], cuts[i + 1]});
    }
    for (const auto& g : groups) {
      const Eigen::MatrixXd A = gram_1d(g.xs, N, width, nodes);
      const Eigen::MatrixXd G = gram_1d(g.ysec, N, width, nodes);
      kron_accumulate(M, basis, A, G);
    }
    return M;
  }

  std::vector<Interval> xs;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) xs.push_back({cuts[i], cuts[i + 1]});
  std::vector<double> x, w;
  composite_nodes(xs, width, nodes, x, w);
  for (std::size_t q = 0; q < x.size(); ++q) {
    const double pt[2] = {x[q], 0.0};
    const auto ysec = omega.section(pt, 1, -X, X);
    if (ysec.empty()) continue;
    const Eigen::MatrixXd G = gram_1d(ysec, N, width, nodes);
    const auto phi = hermite_eval_all(N, x[q]);
    Eigen::MatrixXd A(N + 1, N + 1);
    for (int i = 0; i <= N; ++i)
      for (int j = 0; j <= N; ++j) A(i, j) = w[q] * phi[static_cast<std::size_t>(i)] * phi[static_cast<std::size_t>(j)];
    kron_accumulate(M, basis, A, G);
  }
  return M;
}

double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, Eigen::Index& wi, Eigen::Index& wj)
{
  double mx = 0.0;
  wi = wj = 0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const double v = std::abs(a(i, j) - b(i, j));
      if (v > mx) {
        mx = v;
        wi = i;
        wj = j;
      }
    }
  return mx;
}

}  // namespace

// ---------------------------------------------------------------------------

Eigen::MatrixXd GalerkinOperator::semigroup(double s, double t) const
{
  Eigen::VectorXd e(eigenvalues.size());
  for (Eigen::Index i = 0; i < e.size(); ++i) e[i] = std::exp(-t * std::pow(eigenvalues[i], s));
  return eigenvectors * e.asDiagonal() * eigenvectors.transpose();
}

GalerkinOperator build_galerkin(int m, int k, int d, int N, int margin)
{
  if (m < 1 || k < 1) throw DomainError("build_galerkin: m and k must be >= 1");
  if (d < 1 || d > 2) throw DomainError("build_galerkin: d must be 1 or 2");
  if (N < 0 || (d == 1 && N > 200) || (d == 2 && N > 40))
    throw DomainError("build_galerkin: N must lie in [0, 200] (d = 1) or [0, 40] (d = 2)");
  const int need = std::max(m, k);
  if (margin < 0) margin = 2 * need;
  if (margin < need)
    throw PaddingError("build_galerkin: padding margin " + std::to_string(margin) + " < " + std::to_string(need) +
                       " needed for exact band products");
  const int top = N + margin;
  const auto idx = enumerate(d, top);

  SpMat lap, x2;
  for (int a = 0; a < d; ++a) {
    SpMat dd = second_order(idx, top, a, true);
    SpMat xx = second_order(idx, top, a, false);
    if (a == 0) {
      lap = -dd;
      x2 = xx;
    } else {
      lap += -dd;
      x2 += xx;
    }
  }
  SpMat H = sparse_power(lap, m) + sparse_power(x2, k);
  const auto n = static_cast<Eigen::Index>(basis_size(d, N));

  GalerkinOperator G;
  G.m = m;
  G.k = k;
  G.d = d;
  G.N = N;
  G.margin = margin;
  G.H = Eigen::MatrixXd(H).topLeftCorner(n, n);
  const double scale = std::max(1.0, G.H.cwiseAbs().maxCoeff());
  const double asym = (G.H - G.H.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale) throw NumericalError("build_galerkin: assembled operator is not symmetric");
  G.H = 0.5 * (G.H + G.H.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G.H);
  if (es.info() != Eigen::Success) throw NumericalError("build_galerkin: eigensolver failed");
  G.eigenvalues = es.eigenvalues();
  G.eigenvectors = es.eigenvectors();
  for (Eigen::Index i = 0; i < G.eigenvalues.size(); ++i) {
    double& v = G.eigenvalues[i];
    if (v < kClip) throw NumericalError("build_galerkin: eigenvalue " + format_double(v) + " below clipping threshold");
    if (v < 0.0) {
      v = 0.0;
      ++G.clipped;
    }
  }
  return G;
}

Eigen::VectorXd semigroup_apply(const GalerkinOperator& G, double s, double t, const Eigen::VectorXd& c)
{
  if (!(s > 0.0)) throw DomainError("semigroup_apply: s must be positive");
  if (!(t >= 0.0)) throw DomainError("semigroup_apply: t must be >= 0");
  if (c.size() != static_cast<Eigen::Index>(G.size())) throw DomainError("semigroup_apply: vector size mismatch");
  Eigen::VectorXd y = G.eigenvectors.transpose() * c;
  for (Eigen::Index i = 0; i < y.size(); ++i) y[i] *= std::exp(-t * std::pow(G.eigenvalues[i], s));
  return G.eigenvectors * y;
}

// ---------------------------------------------------------------------------

void GramianQuadrature::validate() const
{
  if (nodes_per_panel < 1 || nodes_per_panel > 200) throw DomainError("Gramian quadrature: nodes_per_panel must lie in [1, 200]");
  if (max_refinements < 1 || max_refinements > 12) throw DomainError("Gramian quadrature: max_refinements must lie in [1, 12]");
  if (!(target > 0.0) || !(tolerance >= target)) throw DomainError("Gramian quadrature: need 0 < target <= tolerance");
}

RestrictionGramian restriction_gramian(const RegionModel& omega, int d, int N, const GramianQuadrature& q)
{
  q.validate();
  if (d < 1 || d > 2) throw DomainError("restriction_gramian: d must be 1 or 2");
  if (omega.dim() != d) throw DomainError("restriction_gramian: region dimension does not match d");
  if (N < 0 || N > 200) throw DomainError("restriction_gramian: N must lie in [0, 200]");
  RestrictionGramian out;
  out.d = d;
  out.N = N;
  out.X_max = std::sqrt(2.0 * N + 1.0) + 6.0;
  const auto n = static_cast<Eigen::Index>(basis_size(d, N));

  if (omega.structure() == RegionModel::Structure::all_space) {
    out.M = Eigen::MatrixXd::Identity(n, n);
    return out;
  }
  if (omega.structure() == RegionModel::Structure::empty) {
    out.M = Eigen::MatrixXd::Zero(n, n);
    return out;
  }

  const int kNodes = q.nodes_per_panel;
  double width = std::min(0.5, 2.5 / std::sqrt(2.0 * N + 1.0));
  Eigen::MatrixXd prev = gramian_at(omega, d, N, out.X_max, width, kNodes);
  double drift = 0.0;
  Eigen::Index wi = 0, wj = 0;
  for (int it = 0; it < q.max_refinements; ++it) {
    width *= 0.5;
    Eigen::MatrixXd cur = gramian_at(omega, d, N, out.X_max, width, kNodes);
    drift = max_abs_diff(prev, cur, wi, wj);
    prev = std::move(cur);
    if (drift <= q.target) break;
  }
  if (drift > q.tolerance)
    throw UnreliableTruncationError("restriction_gramian: entry (" + std::to_string(wi) + "," + std::to_string(wj) +
                                    ") drifts by " + format_double(drift) + " after maximal refinement");
  out.M = 0.5 * (prev + prev.transpose());
  out.drift = drift;
  out.panels = static_cast<int>(std::ceil(1.0 / width));
  out.nodes_per_panel = kNodes;
  return out;
}

SpectralConstant spectral_constant_from_gramian(const RestrictionGramian& g)
{
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.M);
  if (es.info() != Eigen::Success) throw NumericalError("spectral constant: eigensolver failed");
  SpectralConstant out;
  out.lambda_min = es.eigenvalues()[0];
  out.reliable = out.lambda_min > 1e-14;
  out.C_N = out.reliable ? 1.0 / out.lambda_min : std::numeric_limits<double>::infinity();
  const Eigen::VectorXd v = es.eigenvectors().col(0);
  out.minimizer = HermiteExpansion::from_coeffs(g.d, g.N, std::vector<double>(v.data(), v.data() + v.size()));
  return out;
}

SpectralConstant spectral_constant_empirical(const RegionModel& omega, int d, int N, const GramianQuadrature& q)
{
  return spectral_constant_from_gramian(restriction_gramian(omega, d, N, q));
}

namespace {

// lambda_max of (E^2, B) in the eigenbasis of H, B = sum_i w_i E(t_i) Mt E(t_i).
std::pair<double, double> pencil_max(const Eigen::VectorXd& lam_s, const Eigen::MatrixXd& Mt, double T, int nt)
{
  const auto n = lam_s.size();
  const auto rule = gauss_legendre_rule(nt, 0.0, T);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd e(n);
  for (int q = 0; q < nt; ++q) {
    for (Eigen::Index j = 0; j < n; ++j) e[j] = std::exp(-rule.nodes[static_cast<std::size_t>(q)] * lam_s[j]);
    B.noalias() += rule.weights[static_cast<std::size_t>(q)] * (e.asDiagonal() * Mt * e.asDiagonal());
  }
  B = 0.5 * (B + B.transpose()).eval();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) A(j, j) = std::exp(-2.0 * T * lam_s[j]);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eb(B, Eigen::EigenvaluesOnly);
  const double bmin = eb.eigenvalues()[0];
  if (!(bmin > 1e-13))
    throw SingularGramianError("control set too thin at this truncation: observation Gramian lambda_min = " +
                               format_double(bmin));
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ge(A, B, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  if (ge.info() != Eigen::Success) throw SingularGramianError("observability pencil: Cholesky of G_obs failed");
  return {ge.eigenvalues()[n - 1], bmin};
}

}  // namespace

ObservabilityConstant observability_constant_empirical(const GalerkinOperator& G, double s,
                                                       const RestrictionGramian& M, double T, int nt)
{
  if (!(T > 0.0)) throw DomainError("observability constant: T must be positive");
  if (!(s > 0.0)) throw DomainError("observability constant: s must be positive");
  if (nt < 1) throw DomainError("observability constant: nt must be >= 1");
  if (M.d != G.d || M.N != G.N) throw DomainError("observability constant: Gramian and operator truncations differ");
  Eigen::VectorXd lam_s(G.eigenvalues.size());
  for (Eigen::Index i = 0; i < lam_s.size(); ++i) lam_s[i] = std::pow(G.eigenvalues[i], s);
  const Eigen::MatrixXd Mt = G.eigenvectors.transpose() * M.M * G.eigenvectors;
  ObservabilityConstant out;
  out.nt = nt;
  const auto [c1, b1] = pencil_max(lam_s, Mt, T, nt);
  const auto [c2, b2] = pencil_max(lam_s, Mt, T, 2 * nt);
  (void)b2;
  out.C_T = c1;
  out.C_T_2nt = c2;
  out.stability_delta = std::abs(c2 - c1);
  out.obs_lambda_min = b1;
  return out;
}

ObservabilityConstant observability_constant_empirical(const GalerkinOperator& G, double s,
                                                       const RegionModel& omega, double T, int nt)
{
  return observability_constant_empirical(G, s, restriction_gramian(omega, G.d, G.N), T, nt);
}

// ---------------------------------------------------------------------------

UpperEnvelope fit_upper_envelope(const Eigen::MatrixXd& F, const Eigen::VectorXd& y, int shift_column)
{
  if (F.rows() != y.size() || F.rows() < F.cols()) throw DomainError("envelope fit: not enough points");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(F);
  if (qr.rank() < F.cols()) throw NumericalError("envelope fit: degenerate (collinear) design");
  UpperEnvelope out;
  out.coeffs = qr.solve(y);
  Eigen::VectorXd res = y - F * out.coeffs;
  double shift = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < res.size(); ++i) {
    const double f = F(i, shift_column);
    if (!(f > 0.0)) throw DomainError("envelope fit: shift feature must be positive");
    shift = std::max(shift, res[i] / f);
  }
  out.shift = shift;
  out.coeffs[shift_column] += shift;
  out.residuals = y - F * out.coeffs;
  // rounding can leave tiny positive residuals; push them under
  double worst = 0.0;
  for (Eigen::Index i = 0; i < res.size(); ++i) worst = std::max(worst, out.residuals[i] / F(i, shift_column));
  if (worst > 0.0) {
    out.coeffs[shift_column] += worst * (1.0 + 1e-12) + 1e-300;
    out.shift += worst * (1.0 + 1e-12);
    out.residuals = y - F * out.coeffs;
  }
  return out;
}

DissipationFit dissipation_exponent_fit(const GalerkinOperator& G, double s, const std::vector<DissipationOrder>& orders,
                                        const std::vector<double>& t_grid, int trials, std::uint64_t seed)
{
  if (orders.empty()) throw DomainError("dissipation fit: no orders");
  if (trials < 1) throw DomainError("dissipation fit: trials must be >= 1");
  std::vector<double> ts = t_grid;
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  if (ts.size() < 2) throw DomainError("dissipation fit: degenerate t-grid (fewer than two distinct times)");
  for (double t : ts)
    if (!(t > 0.0 && t <= 1.0)) throw DomainError("dissipation fit: t-grid must lie in (0, 1]");
  bool any_order = false;
  for (const auto& o : orders) {
    if (o.alpha.d != G.d || o.beta.d != G.d) throw DomainError("dissipation fit: multi-index dimension mismatch");
    any_order = any_order || (o.alpha.total() + o.beta.total() > 0);
  }

  const auto n = static_cast<Eigen::Index>(G.size());
  // envelope over trials: max log-norm per (order, t)
  std::vector<double> y(orders.size() * ts.size(), -std::numeric_limits<double>::infinity());
  for (int tr = 0; tr < trials; ++tr) {
    const auto g = HermiteExpansion::random_unit(G.d, G.N, seed, static_cast<std::uint64_t>(tr));
    const Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(g.coeffs().data(), n);
    for (std::size_t it = 0; it < ts.size(); ++it) {
      const Eigen::VectorXd u = semigroup_apply(G, s, ts[it], c);
      const auto fu = HermiteExpansion::from_coeffs(G.d, G.N, std::vector<double>(u.data(), u.data() + u.size()));
      for (std::size_t io = 0; io < orders.size(); ++io) {
        const double v = std::log(apply_monomial_derivative(fu, orders[io].alpha, orders[io].beta).norm());
        double& slot = y[io * ts.size() + it];
        slot = std::max(slot, v);
      }
    }
  }

  const auto rows = static_cast<Eigen::Index>(y.size());
  const int cols = any_order ? 3 : 2;
  Eigen::MatrixXd F(rows, cols);
  Eigen::VectorXd Y(rows);
  for (std::size_t io = 0; io < orders.size(); ++io) {
    const double nn = orders[io].alpha.total() + orders[io].beta.total();
    for (std::size_t it = 0; it < ts.size(); ++it) {
      const auto r = static_cast<Eigen::Index>(io * ts.size() + it);
      const double lt = std::log(ts[it]);
      F(r, 0) = 1.0 + nn;
      if (any_order) {
        F(r, 1) = -nn * lt;
        F(r, 2) = -lt;
      } else {
        F(r, 1) = -lt;
      }
      Y[r] = y[static_cast<std::size_t>(r)];
    }
  }
  const UpperEnvelope env = fit_upper_envelope(F, Y, 0);
  DissipationFit out;
  out.logC = env.coeffs[0];
  out.C = std::exp(out.logC);
  if (any_order) {
    out.r1 = env.coeffs[1];
    out.r2 = env.coeffs[2];
  } else {
    out.r2 = env.coeffs[1];
  }
  out.points = static_cast<std::size_t>(rows);
  out.residuals.assign(env.residuals.data(), env.residuals.data() + env.residuals.size());
  return out;
}

// ---------------------------------------------------------------------------

double fit_observability_K(const std::vector<double>& a, const std::vector<double>& logC)
{
  if (a.size() != logC.size() || a.empty()) throw DomainError("fit K: mismatched inputs");
  auto ok = [&](double K) {
    for (std::size_t i = 0; i < a.size(); ++i)
      if (std::log(K) + K * a[i] - logC[i] < 0.0) return false;
    return true;
  };
  if (ok(1.0)) return 1.0;
  double lo = 1.0, hi = 2.0;
  while (!ok(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw NumericalError("fit K: no finite K dominates the data");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (ok(mid)) hi = mid; else lo = mid;
  }
  return hi;
}

SweepResult cost_vs_bound_sweep(const SweepConfig& cfg)
{
  if (cfg.T_grid.empty()) throw DomainError("sweep: empty T grid");
  for (double T : cfg.T_grid)
    if (!(T > 0.0)) throw DomainError("sweep: T values must be positive");
  if (cfg.region.dim() != cfg.d) throw DomainError("sweep: region dimension does not match d");
  cfg.gs.validate();

  SweepResult res;
  const GalerkinOperator G = build_galerkin(cfg.m, cfg.k, cfg.d, cfg.N);
  const RestrictionGramian M = restriction_gramian(cfg.region, cfg.d, cfg.N, cfg.quadrature);

  if (cfg.r1) {
    res.r1 = *cfg.r1;
  } else {
    std::vector<DissipationOrder> orders;
    for (const auto& a : enumerate(cfg.d, cfg.dissipation_max_order))
      for (const auto& b : enumerate(cfg.d, cfg.dissipation_max_order - a.total())) orders.push_back({a, b});
    res.fit = dissipation_exponent_fit(G, cfg.s, orders, cfg.dissipation_t_grid, cfg.dissipation_trials, cfg.seed);
    if (!res.fit.r1) throw NumericalError("sweep: r1 unidentifiable from the dissipation orders");
    res.r1 = *res.fit.r1;
  }
  if (!(res.r1 > 0.0)) throw NumericalError("sweep: fitted r1 is not positive");

  GSParams g = cfg.gs;
  g.r1 = res.r1;
  res.bound_available = g.regime() == Regime::strict;
  res.citation = "K exp(K / T^{2 r1 / (1 - mu - delta nu)})";

  std::vector<double> Ts = cfg.T_grid;
  std::sort(Ts.begin(), Ts.end());
  std::vector<ObservabilityConstant> oc(Ts.size());
  std::vector<std::optional<double>> trunc(Ts.size());
  std::optional<GalerkinOperator> G10;
  std::optional<RestrictionGramian> M10;
  const int N10 = cfg.N + 10;
  const bool do_trunc = cfg.truncation_check && ((cfg.d == 1 && N10 <= 200) || (cfg.d == 2 && N10 <= 40));
  if (do_trunc) {
    G10 = build_galerkin(cfg.m, cfg.k, cfg.d, N10);
    M10 = restriction_gramian(cfg.region, cfg.d, N10, cfg.quadrature);
  }
  parallel_for(Ts.size(), [&](std::size_t i) {
    oc[i] = observability_constant_empirical(G, cfg.s, M, Ts[i], cfg.nt);
    if (do_trunc) trunc[i] = std::abs(observability_constant_empirical(*G10, cfg.s, *M10, Ts[i], cfg.nt).C_T - oc[i].C_T);
  });

  std::vector<double> a(Ts.size()), logC(Ts.size());
  if (res.bound_available) {
    res.exponent = observability_exponent(g);
    for (std::size_t i = 0; i < Ts.size(); ++i) {
      a[i] = std::pow(Ts[i], -res.exponent);
      logC[i] = std::log(oc[i].C_T);
    }
    res.K = fit_observability_K(a, logC);
  } else {
    res.exponent = std::numeric_limits<double>::quiet_NaN();
    res.K = std::numeric_limits<double>::quiet_NaN();
  }
  for (std::size_t i = 0; i < Ts.size(); ++i) {
    SweepRow row;
    row.T = Ts[i];
    row.N = cfg.N;
    row.nt = cfg.nt;
    row.C_T = oc[i].C_T;
    row.C_T_stability_delta = oc[i].stability_delta;
    row.K = res.K;
    if (res.bound_available) {
      row.log_bound = std::log(res.K) + res.K * a[i];
      row.margin = row.log_bound - logC[i];
    } else {
      row.log_bound = std::numeric_limits<double>::quiet_NaN();
      row.margin = std::numeric_limits<double>::quiet_NaN();
    }
    row.truncation_delta = trunc[i];
    res.rows.push_back(row);
  }
  return res;
}

std::string sweep_to_csv(const SweepResult& r)
{
  CsvBuilder csv({"T", "N", "nt", "C_T_empirical", "C_T_stability_delta", "log_bound_fitted", "K_fitted", "margin"});
  for (const auto& row : r.rows) {
    csv.cell(row.T).cell(row.N).cell(row.nt).cell(row.C_T).cell(row.C_T_stability_delta).cell(row.log_bound).cell(row.K).cell(
        row.margin);
    csv.end_row();
  }
  return csv.str();
}

}  // namespace thickobs
