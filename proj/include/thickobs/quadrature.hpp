#pragma once

// Hermite function evaluation and the Gauss rules used throughout.

#include <cstddef>
#include <vector>

namespace thickobs {

/// Normalized Hermite function phi_k(x) by the three-term recurrence, with
/// running rescaling so large k and |x| neither overflow nor underflow early.
double hermite_eval(int k, double x);

/// phi_0(x) .. phi_nmax(x) at a single point (same rescaling as hermite_eval).
std::vector<double> hermite_eval_all(int nmax, double x);

struct QuadratureRule
{
  std::vector<double> nodes;
  std::vector<double> weights;
};

struct GaussHermiteRule
{
  std::vector<double> nodes;
  std::vector<double> weights;         // for integrals of e^{-x^2} g(x)
  std::vector<double> scaled_weights;  // weights * e^{x^2}, for plain integrals of phi-products
};

/// n-point Gauss-Hermite rule, 1 <= n <= 512 (Golub-Welsch + Newton polish).
GaussHermiteRule gauss_hermite_rule(int n);

/// n-point Gauss-Legendre rule on [a, b].
QuadratureRule gauss_legendre_rule(int n, double a = -1.0, double b = 1.0);

}  // namespace thickobs
