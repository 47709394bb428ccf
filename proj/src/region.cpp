#include <algorithm>
#include <cmath>
#include <sstream>

#include "thickobs/error.hpp"
#include "thickobs/geometry.hpp"

namespace thickobs {
namespace {

std::vector<Interval> merge(std::vector<Interval> v)
{
  std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> out;
  for (const auto& iv : v) {
    if (!(iv.hi > iv.lo)) continue;
    if (!out.empty() && iv.lo <= out.back().hi)
      out.back().hi = std::max(out.back().hi, iv.hi);
    else
      out.push_back(iv);
  }
  return out;
}

std::vector<Interval> complement_in(const std::vector<Interval>& v, double lo, double hi)
{
  std::vector<Interval> out;
  double cur = lo;
  for (const auto& iv : v) {
    if (iv.lo > cur) out.push_back({cur, iv.lo});
    cur = std::max(cur, iv.hi);
  }
  if (cur < hi) out.push_back({cur, hi});
  return out;
}

void check_dim(int d)
{
  if (d < 1 || d > 3) throw DomainError("region dimension must lie in [1, 3]");
}

}  // namespace

std::vector<Interval> intersect(const std::vector<Interval>& a, const std::vector<Interval>& b)
{
  std::vector<Interval> out;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double lo = std::max(a[i].lo, b[j].lo);
    const double hi = std::min(a[i].hi, b[j].hi);
    if (hi > lo) out.push_back({lo, hi});
    if (a[i].hi < b[j].hi) ++i; else ++j;
  }
  return out;
}

RegionModel RegionModel::all_space(int dim)
{
  check_dim(dim);
  RegionModel r;
  r.dim_ = dim;
  r.structure_ = Structure::all_space;
  return r;
}

RegionModel RegionModel::empty(int dim)
{
  check_dim(dim);
  RegionModel r;
  r.dim_ = dim;
  r.structure_ = Structure::empty;
  return r;
}

RegionModel RegionModel::box_union(int dim, std::vector<Box> boxes)
{
  check_dim(dim);
  for (const auto& b : boxes) {
    if (b.lo.size() != static_cast<std::size_t>(dim) || b.hi.size() != static_cast<std::size_t>(dim))
      throw DomainError("box_union: box dimension mismatch");
    for (int i = 0; i < dim; ++i)
      if (!(b.hi[static_cast<std::size_t>(i)] >= b.lo[static_cast<std::size_t>(i)]))
        throw DomainError("box_union: box with hi < lo");
  }
  RegionModel r;
  r.dim_ = dim;
  r.structure_ = Structure::box_union;
  r.boxes_ = std::move(boxes);
  return r;
}

RegionModel RegionModel::periodic_1d(int dim, double period, double a, double b, int axis)
{
  check_dim(dim);
  if (!(period > 0.0)) throw DomainError("periodic_1d: period must be positive");
  if (!(a >= 0.0 && a < b && b <= period)) throw DomainError("periodic_1d: need 0 <= a < b <= period");
  if (axis < 0 || axis >= dim) throw DomainError("periodic_1d: axis out of range");
  RegionModel r;
  r.dim_ = dim;
  r.structure_ = Structure::periodic_1d;
  r.period_ = period;
  r.a_ = a;
  r.b_ = b;
  r.axis_ = axis;
  return r;
}

RegionModel RegionModel::half_space(std::vector<double> normal, double offset)
{
  check_dim(static_cast<int>(normal.size()));
  double n2 = 0.0;
  for (double v : normal) n2 += v * v;
  if (!(n2 > 0.0)) throw DomainError("half_space: normal must be non-zero");
  RegionModel r;
  r.dim_ = static_cast<int>(normal.size());
  r.structure_ = Structure::half_space;
  r.normal_ = std::move(normal);
  r.offset_ = offset;
  return r;
}

RegionModel RegionModel::complement(const RegionModel& inner)
{
  RegionModel r;
  r.dim_ = inner.dim_;
  r.structure_ = Structure::complement;
  r.inner_ = std::make_shared<const RegionModel>(inner);
  return r;
}

bool RegionModel::contains(std::span<const double> x) const
{
  switch (structure_) {
    case Structure::all_space:
      return true;
    case Structure::empty:
      return false;
    case Structure::box_union:
      for (const auto& b : boxes_) {
        bool in = true;
        for (int i = 0; i < dim_ && in; ++i) {
          const auto k = static_cast<std::size_t>(i);
          in = x[k] >= b.lo[k] && x[k] <= b.hi[k];
        }
        if (in) return true;
      }
      return false;
    case Structure::periodic_1d: {
      const double v = x[static_cast<std::size_t>(axis_)];
      const double u = v - period_ * std::floor(v / period_);
      return u >= a_ && u <= b_;
    }
    case Structure::half_space: {
      double s = 0.0;
      for (int i = 0; i < dim_; ++i) s += normal_[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
      return s >= offset_;
    }
    case Structure::complement:
      return !inner_->contains(x);
  }
  return false;
}

std::vector<Interval> RegionModel::section(std::span<const double> p, int axis, double lo, double hi) const
{
  if (!(hi > lo)) return {};
  const auto ax = static_cast<std::size_t>(axis);
  switch (structure_) {
    case Structure::all_space:
      return {{lo, hi}};
    case Structure::empty:
      return {};
    case Structure::box_union: {
      std::vector<Interval> parts;
      for (const auto& b : boxes_) {
        bool in = true;
        for (int i = 0; i < dim_ && in; ++i) {
          if (i == axis) continue;
          const auto k = static_cast<std::size_t>(i);
          in = p[k] >= b.lo[k] && p[k] <= b.hi[k];
        }
        if (in) parts.push_back({std::max(lo, b.lo[ax]), std::min(hi, b.hi[ax])});
      }
      return merge(std::move(parts));
    }
    case Structure::periodic_1d: {
      if (axis != axis_) {
        std::vector<double> q(p.begin(), p.end());
        return contains(q) ? std::vector<Interval>{{lo, hi}} : std::vector<Interval>{};
      }
      std::vector<Interval> parts;
      const double k0 = std::floor(lo / period_) - 1.0;
      for (double k = k0; k * period_ + a_ < hi; k += 1.0) {
        const double s = std::max(lo, k * period_ + a_);
        const double e = std::min(hi, k * period_ + b_);
        if (e > s) parts.push_back({s, e});
      }
      return merge(std::move(parts));
    }
    case Structure::half_space: {
      double rest = 0.0;
      for (int i = 0; i < dim_; ++i)
        if (i != axis) rest += normal_[static_cast<std::size_t>(i)] * p[static_cast<std::size_t>(i)];
      const double na = normal_[ax];
      const double rhs = offset_ - rest;
      if (na == 0.0) return rhs <= 0.0 ? std::vector<Interval>{{lo, hi}} : std::vector<Interval>{};
      const double t = rhs / na;
      Interval iv = na > 0.0 ? Interval{std::max(lo, t), hi} : Interval{lo, std::min(hi, t)};
      if (iv.hi > iv.lo) return {iv};
      return {};
    }
    case Structure::complement:
      return complement_in(inner_->section(p, axis, lo, hi), lo, hi);
  }
  return {};
}

std::vector<double> RegionModel::breakpoints(int axis, double lo, double hi) const
{
  std::vector<double> out;
  switch (structure_) {
    case Structure::box_union:
      for (const auto& b : boxes_) {
        out.push_back(b.lo[static_cast<std::size_t>(axis)]);
        out.push_back(b.hi[static_cast<std::size_t>(axis)]);
      }
      break;
    case Structure::periodic_1d:
      if (axis == axis_) {
        for (double k = std::floor(lo / period_) - 1.0; k * period_ < hi + period_; k += 1.0) {
          out.push_back(k * period_ + a_);
          out.push_back(k * period_ + b_);
        }
      }
      break;
    case Structure::half_space: {
      bool axis_only = normal_[static_cast<std::size_t>(axis)] != 0.0;
      for (int i = 0; i < dim_; ++i)
        if (i != axis && normal_[static_cast<std::size_t>(i)] != 0.0) axis_only = false;
      if (axis_only) out.push_back(offset_ / normal_[static_cast<std::size_t>(axis)]);
      break;
    }
    case Structure::complement:
      return inner_->breakpoints(axis, lo, hi);
    default:
      break;
  }
  std::vector<double> kept;
  for (double v : out)
    if (v > lo && v < hi) kept.push_back(v);
  std::sort(kept.begin(), kept.end());
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
  return kept;
}

double RegionModel::measure_1d(double lo, double hi) const
{
  if (dim_ != 1) throw DomainError("measure_1d: region is not one-dimensional");
  const double p = 0.0;
  double s = 0.0;
  for (const auto& iv : section(std::span<const double>(&p, 1), 0, lo, hi)) s += iv.length();
  return s;
}

std::string RegionModel::describe() const
{
  std::ostringstream os;
  os << to_string(structure_) << "(d=" << dim_;
  switch (structure_) {
    case Structure::box_union:
      os << ", " << boxes_.size() << " boxes";
      break;
    case Structure::periodic_1d:
      os << ", period " << period_ << ", kept [" << a_ << "," << b_ << "], axis " << axis_;
      break;
    case Structure::half_space:
      os << ", offset " << offset_;
      break;
    case Structure::complement:
      os << ", of " << inner_->describe();
      break;
    default:
      break;
  }
  os << ")";
  return os.str();
}

std::string to_string(RegionModel::Structure s)
{
  switch (s) {
    case RegionModel::Structure::all_space: return "all_space";
    case RegionModel::Structure::empty: return "empty";
    case RegionModel::Structure::box_union: return "box_union";
    case RegionModel::Structure::periodic_1d: return "periodic_1d";
    case RegionModel::Structure::half_space: return "half_space";
    case RegionModel::Structure::complement: return "complement";
  }
  return "?";
}

}  // namespace thickobs
