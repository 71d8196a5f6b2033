#include "hydrobal/simd/kernels.hpp"

namespace hydrobal::simd::scalar {

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale(double a, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

double dot(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void imbalance_cost(const double* act, const double* forc, const double* spot,
                    const double* sb, const double* ss, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double dev = act[i] - forc[i];
    double price = spot[i];
    if (act[i] < forc[i]) {
      price = sb[i];
    } else if (act[i] > forc[i]) {
      price = ss[i];
    }
    out[i] = -dev * (price - spot[i]);
  }
}

}  // namespace hydrobal::simd::scalar
