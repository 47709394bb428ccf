#pragma once

// Hermite-Galerkin truncations of H_{m,k} = (-Laplacian)^m + |x|^{2k}, their
// fractional heat semigroups, restriction Gramians of control regions and
// the empirical spectral / observability constants built from them.

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "thickobs/constants.hpp"
#include "thickobs/geometry.hpp"
#include "thickobs/hermite.hpp"

namespace thickobs {

struct GalerkinOperator
{
  int m = 1, k = 1, d = 1, N = 0;
  int margin = 0;
  Eigen::MatrixXd H;             // symmetric, graded-lex basis order
  Eigen::VectorXd eigenvalues;   // ascending, clipped at 0
  Eigen::MatrixXd eigenvectors;  // orthonormal columns
  int clipped = 0;               // eigenvalues in (-1e-8, 0) set to 0

  std::size_t size() const { return static_cast<std::size_t>(H.rows()); }
  /// V diag(e^{-t lambda^s}) V^T
  Eigen::MatrixXd semigroup(double s, double t) const;
};

/// Exact band products on a padded index set, restricted to |alpha| <= N.
/// margin < 0 selects the default 2 max(m, k).
GalerkinOperator build_galerkin(int m, int k, int d, int N, int margin = -1);

/// e^{-t H^s} c
Eigen::VectorXd semigroup_apply(const GalerkinOperator& G, double s, double t, const Eigen::VectorXd& c);

struct RestrictionGramian
{
  int d = 1, N = 0;
  Eigen::MatrixXd M;     // int_omega Phi_alpha Phi_beta
  double X_max = 0.0;    // sqrt(2N + 1) + 6
  int panels = 0;        // panels on the finest refinement (per unit-length reference)
  int nodes_per_panel = 0;
  double drift = 0.0;    // max entry change under the last panel doubling
};

struct GramianQuadrature
{
  int nodes_per_panel = 20;
  int max_refinements = 6;   // panel halvings after the initial pass
  double target = 1e-10;     // stop refining once the drift is below this
  double tolerance = 1e-8;   // UnreliableTruncationError above this

  void validate() const;
};

RestrictionGramian restriction_gramian(const RegionModel& omega, int d, int N, const GramianQuadrature& q = {});

struct SpectralConstant
{
  double C_N = 0.0;        // 1 / lambda_min
  double lambda_min = 0.0;
  bool reliable = true;    // false when lambda_min <= 1e-14
  HermiteExpansion minimizer;
};

SpectralConstant spectral_constant_empirical(const RegionModel& omega, int d, int N,
                                             const GramianQuadrature& q = {});
SpectralConstant spectral_constant_from_gramian(const RestrictionGramian& g);

struct ObservabilityConstant
{
  double C_T = 0.0;
  double C_T_2nt = 0.0;
  double stability_delta = 0.0;   // |C_T(2nt) - C_T(nt)|
  double obs_lambda_min = 0.0;    // smallest eigenvalue of the observation Gramian
  int nt = 32;
};

/// lambda_max of the pencil (G_T, G_obs); G_obs from an nt-node Gauss-Legendre rule on [0, T].
ObservabilityConstant observability_constant_empirical(const GalerkinOperator& G, double s,
                                                       const RestrictionGramian& M, double T, int nt = 32);
ObservabilityConstant observability_constant_empirical(const GalerkinOperator& G, double s,
                                                       const RegionModel& omega, double T, int nt = 32);

struct UpperEnvelope
{
  Eigen::VectorXd coeffs;     // least-squares coefficients, shift column raised
  double shift = 0.0;         // amount added to the shift column's coefficient
  Eigen::VectorXd residuals;  // y - F coeffs, all <= 0
};

/// Least squares y ~ F c, then raise c[shift_column] (whose feature must be
/// positive) until every residual is <= 0.
UpperEnvelope fit_upper_envelope(const Eigen::MatrixXd& F, const Eigen::VectorXd& y, int shift_column = 0);

struct DissipationOrder
{
  MultiIndex alpha;
  MultiIndex beta;
};

struct DissipationFit
{
  double C = 1.0;
  std::optional<double> r1;  // unidentifiable when every order has |alpha| + |beta| = 0
  double r2 = 0.0;
  double logC = 0.0;
  std::size_t points = 0;
  std::vector<double> residuals;
};

/// Upper-envelope fit of log ||x^alpha d^beta e^{-tH^s} g|| over seeded random unit g.
DissipationFit dissipation_exponent_fit(const GalerkinOperator& G, double s, const std::vector<DissipationOrder>& orders,
                                        const std::vector<double>& t_grid, int trials = 8, std::uint64_t seed = 1);

struct SweepConfig
{
  int m = 1, k = 1;
  double s = 1.0;
  int d = 1;
  int N = 30;
  RegionModel region = RegionModel::all_space(1);
  std::vector<double> T_grid;
  int nt = 32;
  std::uint64_t seed = 1;
  GSParams gs;                      // mu, nu, delta used for the exponent
  std::optional<double> r1;         // fitted when absent
  std::vector<double> dissipation_t_grid = {0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 1.0};
  int dissipation_max_order = 2;
  int dissipation_trials = 8;
  bool truncation_check = true;     // also compute C_T at N + 10
  GramianQuadrature quadrature;
};

struct SweepRow
{
  double T = 0.0;
  int N = 0;
  int nt = 0;
  double C_T = 0.0;
  double C_T_stability_delta = 0.0;
  double log_bound = 0.0;
  double K = 0.0;
  double margin = 0.0;
  std::optional<double> truncation_delta;  // |C_T(N + 10) - C_T(N)|
};

struct SweepResult
{
  std::vector<SweepRow> rows;
  double K = 0.0;
  double exponent = 0.0;
  double r1 = 0.0;
  bool bound_available = true;  // false in the critical regime
  DissipationFit fit;
  std::string citation;
};

/// Smallest K >= 1 with log K + K a_i >= log C_i for every point.
double fit_observability_K(const std::vector<double>& a, const std::vector<double>& logC);

SweepResult cost_vs_bound_sweep(const SweepConfig& cfg);

std::string sweep_to_csv(const SweepResult& r);

}  // namespace thickobs
