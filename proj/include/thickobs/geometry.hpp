#pragma once

// Densities, control regions, thickness probes, slowly-varying ball covers
// and the good/bad ball classifier.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "thickobs/hermite.hpp"

namespace thickobs {

/// Positive contraction density rho with m <= rho <= R <x>^delta.
struct DensityModel
{
  enum class Kind { constant, power, custom };

  Kind kind = Kind::constant;
  double m = 1.0;       // lower bound (constant value for Kind::constant)
  double R = 1.0;       // upper envelope R <x>^delta
  double delta = 0.0;
  double L = 0.0;       // Lipschitz constant (certified for constant/power, declared for custom)
  std::function<double(std::span<const double>)> fn;  // custom only
  std::string descriptor;                             // custom only, for reports

  static DensityModel constant(double m);
  /// rho(x) = R <x>^delta; Lipschitz certificate R delta.
  static DensityModel power(double R, double delta);
  static DensityModel custom(std::function<double(std::span<const double>)> fn, double lipschitz, double lower,
                             double upper_R, double upper_delta, std::string descriptor);

  double operator()(std::span<const double> x) const;
  void validate() const;
  /// Slowly-varying constant C = 1/(1 - L).
  double slowness() const { return 1.0 / (1.0 - L); }
};

std::string to_string(DensityModel::Kind k);

struct Interval
{
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
};

/// Measurable control set described structurally.
class RegionModel
{
 public:
  enum class Structure { all_space, empty, box_union, periodic_1d, half_space, complement };

  struct Box
  {
    std::vector<double> lo;
    std::vector<double> hi;
  };

  static RegionModel all_space(int dim);
  static RegionModel empty(int dim);
  static RegionModel box_union(int dim, std::vector<Box> boxes);
  /// {x : (x_axis mod period) in [a, b]} with 0 <= a < b <= period.
  static RegionModel periodic_1d(int dim, double period, double a, double b, int axis = 0);
  /// {x : normal . x >= offset}
  static RegionModel half_space(std::vector<double> normal, double offset);
  static RegionModel complement(const RegionModel& inner);

  int dim() const { return dim_; }
  Structure structure() const { return structure_; }
  const std::vector<Box>& boxes() const { return boxes_; }
  double period() const { return period_; }
  double keep_lo() const { return a_; }
  double keep_hi() const { return b_; }
  int axis() const { return axis_; }
  const std::vector<double>& normal() const { return normal_; }
  double offset() const { return offset_; }
  const RegionModel& inner() const { return *inner_; }

  bool contains(std::span<const double> x) const;

  /// The set {t in [lo, hi] : p + (t - p_axis) e_axis in omega} as sorted
  /// disjoint intervals. p's axis coordinate is ignored.
  std::vector<Interval> section(std::span<const double> p, int axis, double lo, double hi) const;

  /// Coordinates along `axis` in [lo, hi] where sections transverse to the
  /// axis may change discontinuously (box faces, lattice cell edges).
  std::vector<double> breakpoints(int axis, double lo, double hi) const;

  /// |omega cap [lo, hi]| for d = 1.
  double measure_1d(double lo, double hi) const;

  std::string describe() const;

 private:
  int dim_ = 1;
  Structure structure_ = Structure::all_space;
  std::vector<Box> boxes_;
  double period_ = 1.0, a_ = 0.0, b_ = 0.5;
  int axis_ = 0;
  std::vector<double> normal_;
  double offset_ = 0.0;
  std::shared_ptr<const RegionModel> inner_;
};

std::string to_string(RegionModel::Structure s);

/// Intersection of sorted disjoint interval lists.
std::vector<Interval> intersect(const std::vector<Interval>& a, const std::vector<Interval>& b);

// ---------------------------------------------------------------------------

struct ThicknessProbe
{
  enum class Method { automatic, exact, monte_carlo };
  enum class Sampler { pseudo, halton };

  std::vector<double> centers;  // packed row-wise, d per center
  std::size_t samples = 10'000;
  std::uint64_t seed = 20240229;
  Method method = Method::automatic;
  Sampler sampler = Sampler::pseudo;

  /// Regular grid of `count` points per axis over [lo, hi]^d.
  static std::vector<double> grid(int d, double lo, double hi, int count);
};

struct ThicknessResult
{
  double gamma_hat = 1.0;   // probed thickness: min over probed centers
  double std_error = 0.0;   // Monte Carlo standard error at the minimizing center (0 when exact)
  bool exact = false;
  std::size_t worst_center = 0;
  std::vector<double> ratios;  // per center
  std::vector<double> radii;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};

ThicknessResult thickness_estimate(const RegionModel& omega, const DensityModel& rho, const ThicknessProbe& probe);

// ---------------------------------------------------------------------------

struct BallCover
{
  int dim = 1;
  std::vector<double> centers;  // packed row-wise
  std::vector<double> radii;
  std::vector<double> domain_lo;
  std::vector<double> domain_hi;
  double lipschitz = 0.0;
  std::uint64_t overlap_bound = 1;  // floor((4 C^3 + 1)^d), C = 1/(1 - L)
  double grid_step = 0.0;

  std::size_t size() const { return radii.size(); }
  std::span<const double> center(std::size_t k) const
  {
    return {centers.data() + k * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
};

std::uint64_t overlap_bound(double L, int d);

/// Greedy cover of a box by balls B(x_k, rho(x_k)). A scan point counts as
/// covered only with margin h sqrt(d)/2, so every point of the box is covered.
BallCover build_cover(const DensityModel& rho, std::span<const double> lo, std::span<const double> hi,
                      double grid_step = 0.0);

std::string cover_to_csv(const BallCover& c);

struct OverlapReport
{
  std::uint64_t max_multiplicity = 0;
  std::vector<double> witness;  // point attaining the max
  bool within_bound = true;
  std::size_t uncovered = 0;    // probe points lying in no ball
};

/// Multiplicities over a regular probe grid with `per_axis` points on each axis.
OverlapReport verify_overlap(const BallCover& c, int per_axis);
/// Same over explicit probe points.
OverlapReport verify_overlap(const BallCover& c, std::span<const double> points);
/// Throws NumericalError naming the witness when the bound is violated.
void require_overlap(const BallCover& c, const OverlapReport& r);

// ---------------------------------------------------------------------------

/// log N_{p,q} for the double-index sequence of the classifier.
using LogDoubleSequence = std::function<double(int p, int q)>;

struct BallLabel
{
  bool good = true;
  int witness_p = -1;
  MultiIndex witness_beta;
  double mass = 0.0;  // int_{B_k} |f|^2
};

struct Classification
{
  std::vector<BallLabel> labels;
  int order = 6;          // good up to order P
  bool vacuous = false;   // P == 0
  std::uint64_t K0 = 1;
  double bad_mass = 0.0;  // sum over bad balls of int_{B_k} |f|^2
};

Classification classify_balls(const HermiteExpansion& f, const BallCover& cover, const DensityModel& rho,
                              double eps, const LogDoubleSequence& logN, int P = 6);

std::string classification_to_csv(const Classification& c);

/// sup_{p <= P, |beta| <= P} ||rho^p d^beta f||_{L2(R^d)} / N_{p,|beta|} (quadrature).
double gs_density_seminorm(const HermiteExpansion& f, const DensityModel& rho, const LogDoubleSequence& logN,
                           int P);

}  // namespace thickobs
