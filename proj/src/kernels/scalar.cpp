#include "thickobs/kernels.hpp"

#include <cmath>
#include <numbers>

namespace thickobs::kernels::scalar {

void hermite_table(std::span<const double> xs, int nmax, std::span<double> out)
{
  const std::size_t n = xs.size();
  if (nmax < 0 || n == 0) return;
  const double c0 = 1.0 / std::sqrt(std::sqrt(std::numbers::pi));
  for (std::size_t i = 0; i < n; ++i) out[i] = c0 * std::exp(-0.5 * xs[i] * xs[i]);
  if (nmax == 0) return;
  for (std::size_t i = 0; i < n; ++i) out[n + i] = std::numbers::sqrt2 * xs[i] * out[i];
  for (int k = 1; k < nmax; ++k) {
    const double a = std::sqrt(2.0 / (k + 1));
    const double b = std::sqrt(static_cast<double>(k) / (k + 1));
    const double* prev = out.data() + (k - 1) * n;
    const double* cur = out.data() + k * n;
    double* next = out.data() + (k + 1) * n;
    for (std::size_t i = 0; i < n; ++i) next[i] = a * xs[i] * cur[i] - b * prev[i];
  }
}

double dot(std::span<const double> a, std::span<const double> b)
{
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y)
{
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void axpy_prod(double alpha, std::span<const double> a, std::span<const double> b,
               std::span<double> y)
{
  for (std::size_t i = 0; i < a.size(); ++i) y[i] += alpha * a[i] * b[i];
}

}  // namespace thickobs::kernels::scalar
