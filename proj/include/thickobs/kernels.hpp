#pragma once

// Data-parallel inner loops used by the Hermite quadrature and Gramian code.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2+FMA variant. The variant is chosen once at runtime from the CPU
// feature flags; THICKOBS_SIMD=scalar in the environment forces the scalar
// path. Results of the two paths agree to rounding (FMA contracts products),
// not bit for bit.

#include <cstddef>
#include <span>
#include <string_view>

namespace thickobs::kernels {

enum class Backend { scalar, avx2 };

/// Table of normalized Hermite functions phi_0..phi_nmax at the points xs.
/// Layout is row-major by degree: out[k * xs.size() + i] = phi_k(xs[i]).
/// Valid for |x| <= kTableRange; larger |x| underflow in the seed term.
inline constexpr double kTableRange = 37.0;

struct KernelTable
{
  void (*hermite_table)(std::span<const double> xs, int nmax, std::span<double> out);
  double (*dot)(std::span<const double> a, std::span<const double> b);
  void (*axpy)(double alpha, std::span<const double> x, std::span<double> y);
  // y += alpha * (a .* b)
  void (*axpy_prod)(double alpha, std::span<const double> a, std::span<const double> b,
                    std::span<double> y);
};

namespace scalar {
void hermite_table(std::span<const double> xs, int nmax, std::span<double> out);
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void axpy_prod(double alpha, std::span<const double> a, std::span<const double> b,
               std::span<double> y);
}  // namespace scalar

namespace avx2 {
bool compiled();
void hermite_table(std::span<const double> xs, int nmax, std::span<double> out);
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void axpy_prod(double alpha, std::span<const double> a, std::span<const double> b,
               std::span<double> y);
}  // namespace avx2

/// True when the AVX2 variant is compiled in and the CPU reports AVX2 and FMA.
bool avx2_available();

Backend active_backend();
std::string_view backend_name(Backend b);

/// Force a backend (tests). Requesting avx2 on an unsupported CPU throws.
void set_backend(Backend b);

const KernelTable& table(Backend b);
const KernelTable& active();

inline void hermite_table(std::span<const double> xs, int nmax, std::span<double> out)
{
  active().hermite_table(xs, nmax, out);
}
inline double dot(std::span<const double> a, std::span<const double> b) { return active().dot(a, b); }
inline void axpy(double alpha, std::span<const double> x, std::span<double> y)
{
  active().axpy(alpha, x, y);
}
inline void axpy_prod(double alpha, std::span<const double> a, std::span<const double> b,
                      std::span<double> y)
{
  active().axpy_prod(alpha, a, b, y);
}

}  // namespace thickobs::kernels
