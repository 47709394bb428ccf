#include "thickobs/kernels.hpp"

#include <cmath>
#include <numbers>

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>
#define THICKOBS_HAVE_AVX2 1
#else
#define THICKOBS_HAVE_AVX2 0
#endif

namespace thickobs::kernels::avx2 {

#if THICKOBS_HAVE_AVX2

bool compiled() { return true; }

void hermite_table(std::span<const double> xs, int nmax, std::span<double> out)
{
  const std::size_t n = xs.size();
  if (nmax < 0 || n == 0) return;
  const double c0 = 1.0 / std::sqrt(std::sqrt(std::numbers::pi));
  // No vector exp; the seed row stays scalar.
  for (std::size_t i = 0; i < n; ++i) out[i] = c0 * std::exp(-0.5 * xs[i] * xs[i]);
  if (nmax == 0) return;

  const std::size_t nv = n & ~std::size_t{3};
  const __m256d sqrt2 = _mm256_set1_pd(std::numbers::sqrt2);
  for (std::size_t i = 0; i < nv; i += 4) {
    __m256d x = _mm256_loadu_pd(xs.data() + i);
    __m256d p0 = _mm256_loadu_pd(out.data() + i);
    _mm256_storeu_pd(out.data() + n + i, _mm256_mul_pd(_mm256_mul_pd(sqrt2, x), p0));
  }
  for (std::size_t i = nv; i < n; ++i) out[n + i] = std::numbers::sqrt2 * xs[i] * out[i];

  for (int k = 1; k < nmax; ++k) {
    const double a = std::sqrt(2.0 / (k + 1));
    const double b = std::sqrt(static_cast<double>(k) / (k + 1));
    const __m256d va = _mm256_set1_pd(a);
    const __m256d vb = _mm256_set1_pd(b);
    const double* prev = out.data() + (k - 1) * n;
    const double* cur = out.data() + k * n;
    double* next = out.data() + (k + 1) * n;
    for (std::size_t i = 0; i < nv; i += 4) {
      __m256d x = _mm256_loadu_pd(xs.data() + i);
      __m256d c = _mm256_loadu_pd(cur + i);
      __m256d p = _mm256_loadu_pd(prev + i);
      // a*x*c - b*p
      __m256d ax = _mm256_mul_pd(va, x);
      _mm256_storeu_pd(next + i, _mm256_fmsub_pd(ax, c, _mm256_mul_pd(vb, p)));
    }
    for (std::size_t i = nv; i < n; ++i) next[i] = a * xs[i] * cur[i] - b * prev[i];
  }
}

double dot(std::span<const double> a, std::span<const double> b)
{
  const std::size_t n = a.size();
  const std::size_t n16 = n & ~std::size_t{15};
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  __m256d s2 = _mm256_setzero_pd();
  __m256d s3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i < n16; i += 16) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i + 4), _mm256_loadu_pd(b.data() + i + 4), s1);
    s2 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i + 8), _mm256_loadu_pd(b.data() + i + 8), s2);
    s3 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i + 12), _mm256_loadu_pd(b.data() + i + 12), s3);
  }
  for (; i + 4 <= n; i += 4)
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i), s0);
  __m256d s = _mm256_add_pd(_mm256_add_pd(s0, s1), _mm256_add_pd(s2, s3));
  __m128d lo = _mm256_castpd256_pd128(s);
  __m128d hi = _mm256_extractf128_pd(s, 1);
  lo = _mm_add_pd(lo, hi);
  double total = _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
  for (; i < n; ++i) total += a[i] * b[i];
  return total;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y)
{
  const std::size_t n = x.size();
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y.data() + i);
    _mm256_storeu_pd(y.data() + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x.data() + i), vy));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void axpy_prod(double alpha, std::span<const double> a, std::span<const double> b,
               std::span<double> y)
{
  const std::size_t n = a.size();
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d ab = _mm256_mul_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i));
    __m256d vy = _mm256_loadu_pd(y.data() + i);
    _mm256_storeu_pd(y.data() + i, _mm256_fmadd_pd(va, ab, vy));
  }
  for (; i < n; ++i) y[i] += alpha * a[i] * b[i];
}

#else

bool compiled() { return false; }
void hermite_table(std::span<const double> xs, int nmax, std::span<double> out)
{
  scalar::hermite_table(xs, nmax, out);
}
double dot(std::span<const double> a, std::span<const double> b) { return scalar::dot(a, b); }
void axpy(double alpha, std::span<const double> x, std::span<double> y) { scalar::axpy(alpha, x, y); }
void axpy_prod(double alpha, std::span<const double> a, std::span<const double> b,
               std::span<double> y)
{
  scalar::axpy_prod(alpha, a, b, y);
}

#endif

}  // namespace thickobs::kernels::avx2
