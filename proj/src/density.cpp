#include <cmath>

#include "thickobs/error.hpp"
#include "thickobs/geometry.hpp"

namespace thickobs {

DensityModel DensityModel::constant(double m)
{
  DensityModel r;
  r.kind = Kind::constant;
  r.m = m;
  r.R = m;
  r.delta = 0.0;
  r.L = 0.0;
  r.validate();
  return r;
}

DensityModel DensityModel::power(double R, double delta)
{
  DensityModel r;
  r.kind = Kind::power;
  r.R = R;
  r.delta = delta;
  r.m = R;  // <x> >= 1
  r.L = R * delta;
  r.validate();
  return r;
}

DensityModel DensityModel::custom(std::function<double(std::span<const double>)> fn, double lipschitz,
                                  double lower, double upper_R, double upper_delta, std::string descriptor)
{
  DensityModel r;
  r.kind = Kind::custom;
  r.fn = std::move(fn);
  r.L = lipschitz;
  r.m = lower;
  r.R = upper_R;
  r.delta = upper_delta;
  r.descriptor = std::move(descriptor);
  r.validate();
  return r;
}

void DensityModel::validate() const
{
  if (!(m > 0.0) || !std::isfinite(m)) throw DomainError("density: lower bound m must be positive");
  if (!(R > 0.0) || !std::isfinite(R)) throw DomainError("density: R must be positive");
  if (!(delta >= 0.0 && delta <= 1.0)) throw DomainError("density: delta must lie in [0, 1]");
  if (!(L >= 0.0)) throw DomainError("density: Lipschitz constant must be >= 0");
  if (!(L < 1.0)) throw DomainError("density is not a contraction (L >= 1)");
  if (kind == Kind::custom && !fn) throw DomainError("custom density without a callable");
}

double DensityModel::operator()(std::span<const double> x) const
{
  switch (kind) {
    case Kind::constant:
      return m;
    case Kind::power: {
      double r2 = 1.0;
      for (double v : x) r2 += v * v;
      return R * std::pow(r2, 0.5 * delta);
    }
    case Kind::custom:
      return fn(x);
  }
  return m;
}

std::string to_string(DensityModel::Kind k)
{
  switch (k) {
    case DensityModel::Kind::constant: return "constant";
    case DensityModel::Kind::power: return "power";
    case DensityModel::Kind::custom: return "custom";
  }
  return "?";
}

}  // namespace thickobs
