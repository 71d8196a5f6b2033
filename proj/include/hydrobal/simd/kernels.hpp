#pragma once

// Data-parallel inner loops used by the simplex tableau and the settlement
// math. Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2/FMA variant. The active backend is chosen once at startup from CPUID
// and can be overridden for equivalence testing.

#include <span>
#include <string_view>

namespace hydrobal::simd {

enum class Backend { Scalar, Avx2 };

std::string_view backend_name(Backend b);
bool backend_supported(Backend b);
Backend active_backend();

// Throws std::invalid_argument when the backend is not supported on this CPU.
void set_backend(Backend b);

/// y += a * x. Spans must have equal length.
void axpy(double a, std::span<const double> x, std::span<double> y);

/// x *= a.
void scale(double a, std::span<double> x);

double dot(std::span<const double> x, std::span<const double> y);

/// Two-price cost of imperfect forecast, elementwise:
///   out[t] = -(act[t] - forc[t]) * (price[t] - spot[t])
/// with price = system_buy when act < forc, system_sell when act > forc and
/// spot otherwise.
void imbalance_cost(std::span<const double> act, std::span<const double> forc,
                    std::span<const double> spot, std::span<const double> system_buy,
                    std::span<const double> system_sell, std::span<double> out);

// Backend-specific entry points, exposed for equivalence tests.
namespace scalar {
void axpy(double a, const double* x, double* y, std::size_t n);
void scale(double a, double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
void imbalance_cost(const double* act, const double* forc, const double* spot,
                    const double* sb, const double* ss, double* out, std::size_t n);
}  // namespace scalar

namespace avx2 {
void axpy(double a, const double* x, double* y, std::size_t n);
void scale(double a, double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
void imbalance_cost(const double* act, const double* forc, const double* spot,
                    const double* sb, const double* ss, double* out, std::size_t n);
}  // namespace avx2

}  // namespace hydrobal::simd
