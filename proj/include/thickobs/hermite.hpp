#pragma once

// Hermite expansions on R^d (d <= 3) and the ladder-operator algebra on their
// coefficients.
//
//   x phi_k  = sqrt((k+1)/2) phi_{k+1} + sqrt(k/2) phi_{k-1}
//   d phi_k  = sqrt(k/2) phi_{k-1} - sqrt((k+1)/2) phi_{k+1}
//
// Every operator raises the level by one, so x^alpha d^beta f is represented
// exactly in the expansion of level N + |alpha| + |beta|. Norms of such
// products are plain l2 norms of coefficient vectors; no quadrature.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "thickobs/multi_index.hpp"
#include "thickobs/sequences.hpp"

namespace thickobs {

class HermiteExpansion
{
 public:
  HermiteExpansion() = default;
  /// Zero expansion of dimension d and level N.
  HermiteExpansion(int d, int N);

  static HermiteExpansion basis(int d, int N, const MultiIndex& alpha);
  static HermiteExpansion from_coeffs(int d, int N, std::vector<double> coeffs);
  /// Seeded Gaussian coefficients, normalized to unit L2 norm.
  static HermiteExpansion random_unit(int d, int N, std::uint64_t seed, std::uint64_t stream = 0);

  int dim() const { return d_; }
  int level() const { return N_; }
  std::size_t size() const { return c_.size(); }
  const std::vector<double>& coeffs() const { return c_; }
  std::vector<double>& coeffs() { return c_; }

  double operator[](const MultiIndex& alpha) const;
  double& at(const MultiIndex& alpha);

  double norm() const;
  double norm_squared() const;

  /// Same function at a different level: zero-padded when raising, truncated
  /// (orthogonal projection) when lowering.
  HermiteExpansion with_level(int N) const;

  /// Point values; points are packed row-wise (point i at [i*d, i*d + d)).
  std::vector<double> evaluate(std::span<const double> points) const;

  HermiteExpansion& operator+=(const HermiteExpansion& o);
  HermiteExpansion& operator*=(double a);

 private:
  int d_ = 1;
  int N_ = 0;
  std::vector<double> c_;
};

/// Multiplication by x_axis (level + 1).
HermiteExpansion apply_x(const HermiteExpansion& f, int axis);
/// Derivative along axis (level + 1).
HermiteExpansion apply_d(const HermiteExpansion& f, int axis);
/// x^alpha d^beta f, exactly, at level N + |alpha| + |beta|.
HermiteExpansion apply_monomial_derivative(const HermiteExpansion& f, const MultiIndex& alpha,
                                           const MultiIndex& beta);
/// (-Laplacian + |x|^2) f, exactly.
HermiteExpansion apply_harmonic(const HermiteExpansion& f);

/// Banded position/derivative operators for a fixed base level with a
/// declared padding margin. Requests beyond the margin throw PaddingError.
class LadderOperators
{
 public:
  LadderOperators(int d, int level, int margin);

  int dim() const { return d_; }
  int level() const { return level_; }
  int margin() const { return margin_; }

  HermiteExpansion apply(const HermiteExpansion& f, const MultiIndex& alpha, const MultiIndex& beta) const;

  /// Non-zero band entries of X_axis (which == 'X') or D_axis (which == 'D')
  /// on the padded space, as CSV rows "row,col,value".
  std::string band_csv(int axis, char which) const;

 private:
  int d_;
  int level_;
  int margin_;
  // up_[axis][r] = rank(alpha + e_axis), down_[axis][r] = rank(alpha - e_axis) or npos
  std::vector<std::vector<std::size_t>> up_;
  std::vector<std::vector<std::size_t>> down_;
  std::vector<MultiIndex> indices_;
};

/// ||x^alpha d^beta f||_{L2}.
double weighted_seminorm(const HermiteExpansion& f, const MultiIndex& alpha, const MultiIndex& beta);
double weighted_seminorm(const LadderOperators& ops, const HermiteExpansion& f, const MultiIndex& alpha,
                         const MultiIndex& beta);

/// 2^{n/2} sqrt((N + n)! / N!) with n = |alpha| + |beta|.
double bernstein_factor(int N, int n);

struct BernsteinResult
{
  double max_ratio = 0.0;
  int trials = 0;
};

/// Max over seeded random f in E_N of ||x^alpha d^beta f|| / (bernstein_factor ||f||).
BernsteinResult bernstein_check(int d, int N, const MultiIndex& alpha, const MultiIndex& beta, int trials,
                                std::uint64_t seed);

/// log (sum_alpha e^{2 Theta(|alpha|)} |c_alpha|^2)^{1/2}, in log-sum-exp form.
double log_gs_theta_norm(const HermiteExpansion& f, const WeightModel& w);
double gs_theta_norm(const HermiteExpansion& f, const WeightModel& w);

/// ||<x>^p d^beta f|| for integer p, via sum over |gamma| = p of p!/gamma! ||x^gamma d^beta f||^2.
double bracket_seminorm(const HermiteExpansion& f, int p, const MultiIndex& beta);

/// ||<x>^q d^beta f|| for real q >= 0 by tensor Gauss-Hermite quadrature.
double bracket_seminorm_real(const HermiteExpansion& f, double q, const MultiIndex& beta);

struct PairSeminorm
{
  double value = 0.0;  // truncated supremum
  int order = 0;       // truncation order P: p <= P and |beta| <= P
  int argmax_p = 0;
  MultiIndex argmax_beta;
};

/// sup_{p <= P, |beta| <= P} ||<x>^p d^beta f|| / (A^{p+|beta|} (p!)^nu (|beta|!)^mu).
PairSeminorm gs_pair_seminorm(const HermiteExpansion& f, double A, double mu, double nu, int P);

/// Orthogonal projection onto E_{N'}.
HermiteExpansion project(const HermiteExpansion& f, int Nprime);

/// CSV with columns a0..a{d-1},real,imag in rank order.
std::string expansion_to_csv(const HermiteExpansion& f);
/// Inverse of expansion_to_csv; rejects non-zero imaginary parts.
HermiteExpansion expansion_from_csv(const std::string& text);

}  // namespace thickobs
