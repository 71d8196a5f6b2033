#include <cassert>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "hydrobal/simd/kernels.hpp"

namespace hydrobal::simd {
namespace {

struct KernelTable {
  Backend backend;
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*scale)(double, double*, std::size_t);
  double (*dot)(const double*, const double*, std::size_t);
  void (*imbalance_cost)(const double*, const double*, const double*, const double*,
                         const double*, double*, std::size_t);
};

constexpr KernelTable kScalarTable{Backend::Scalar, scalar::axpy, scalar::scale, scalar::dot,
                                   scalar::imbalance_cost};
constexpr KernelTable kAvx2Table{Backend::Avx2, avx2::axpy, avx2::scale, avx2::dot,
                                 avx2::imbalance_cost};

bool cpu_has_avx2() {
#if defined(HYDROBAL_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* initial_table() {
  // HYDROBAL_SIMD=scalar forces the reference kernels.
  if (const char* env = std::getenv("HYDROBAL_SIMD"); env && std::string(env) == "scalar") {
    return &kScalarTable;
  }
  return cpu_has_avx2() ? &kAvx2Table : &kScalarTable;
}

const KernelTable*& table() {
  static const KernelTable* t = initial_table();
  return t;
}

}  // namespace

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return "scalar";
    case Backend::Avx2:
      return "avx2";
  }
  return "unknown";
}

bool backend_supported(Backend b) { return b == Backend::Scalar || cpu_has_avx2(); }

Backend active_backend() { return table()->backend; }

void set_backend(Backend b) {
  if (!backend_supported(b)) {
    throw std::invalid_argument("SIMD backend not supported on this CPU: " +
                                std::string(backend_name(b)));
  }
  table() = b == Backend::Avx2 ? &kAvx2Table : &kScalarTable;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  table()->axpy(a, x.data(), y.data(), y.size());
}

void scale(double a, std::span<double> x) { table()->scale(a, x.data(), x.size()); }

double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  return table()->dot(x.data(), y.data(), x.size());
}

void imbalance_cost(std::span<const double> act, std::span<const double> forc,
                    std::span<const double> spot, std::span<const double> system_buy,
                    std::span<const double> system_sell, std::span<double> out) {
  const std::size_t n = out.size();
  if (act.size() != n || forc.size() != n || spot.size() != n || system_buy.size() != n ||
      system_sell.size() != n) {
    throw std::invalid_argument("imbalance_cost: series length mismatch");
  }
  table()->imbalance_cost(act.data(), forc.data(), spot.data(), system_buy.data(),
                          system_sell.data(), out.data(), n);
}

}  // namespace hydrobal::simd
