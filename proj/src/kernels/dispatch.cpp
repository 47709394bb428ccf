#include "thickobs/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace thickobs::kernels {
namespace {

constexpr KernelTable kScalar{&scalar::hermite_table, &scalar::dot, &scalar::axpy,
                              &scalar::axpy_prod};
constexpr KernelTable kAvx2{&avx2::hermite_table, &avx2::dot, &avx2::axpy, &avx2::axpy_prod};

bool cpu_has_avx2_fma()
{
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend detect()
{
  if (const char* env = std::getenv("THICKOBS_SIMD")) {
    if (std::string(env) == "scalar") return Backend::scalar;
  }
  return avx2_available() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& current()
{
  static std::atomic<Backend> b{detect()};
  return b;
}

}  // namespace

bool avx2_available()
{
  static const bool ok = avx2::compiled() && cpu_has_avx2_fma();
  return ok;
}

Backend active_backend() { return current().load(std::memory_order_relaxed); }

std::string_view backend_name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

void set_backend(Backend b)
{
  if (b == Backend::avx2 && !avx2_available())
    throw std::runtime_error("AVX2 kernels unavailable on this CPU/build");
  current().store(b, std::memory_order_relaxed);
}

const KernelTable& table(Backend b) { return b == Backend::avx2 ? kAvx2 : kScalar; }

const KernelTable& active() { return table(active_backend()); }

}  // namespace thickobs::kernels
