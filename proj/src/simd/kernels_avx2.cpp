#include "hydrobal/simd/kernels.hpp"

#if defined(HYDROBAL_HAVE_AVX2)
#include <immintrin.h>
#endif

#include <stdexcept>

namespace hydrobal::simd::avx2 {

#if defined(HYDROBAL_HAVE_AVX2)

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256d y0 = _mm256_loadu_pd(y + i);
    __m256d y1 = _mm256_loadu_pd(y + i + 4);
    y0 = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), y0);
    y1 = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i + 4), y1);
    _mm256_storeu_pd(y + i, y0);
    _mm256_storeu_pd(y + i + 4, y1);
  }
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scale(double a, double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) x[i] *= a;
}

double dot(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  }
  acc0 = _mm256_add_pd(acc0, acc1);
  __m128d lo = _mm256_castpd256_pd128(acc0);
  __m128d hi = _mm256_extractf128_pd(acc0, 1);
  lo = _mm_add_pd(lo, hi);
  double s = _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void imbalance_cost(const double* act, const double* forc, const double* spot,
                    const double* sb, const double* ss, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(act + i);
    const __m256d f = _mm256_loadu_pd(forc + i);
    const __m256d s = _mm256_loadu_pd(spot + i);
    const __m256d short_mask = _mm256_cmp_pd(a, f, _CMP_LT_OQ);
    const __m256d long_mask = _mm256_cmp_pd(a, f, _CMP_GT_OQ);
    __m256d price = _mm256_blendv_pd(s, _mm256_loadu_pd(sb + i), short_mask);
    price = _mm256_blendv_pd(price, _mm256_loadu_pd(ss + i), long_mask);
    const __m256d dev = _mm256_sub_pd(a, f);
    const __m256d spread = _mm256_sub_pd(price, s);
    // -(dev * spread); negation via sign-bit flip keeps the scalar rounding.
    const __m256d prod = _mm256_mul_pd(dev, spread);
    _mm256_storeu_pd(out + i, _mm256_xor_pd(prod, _mm256_set1_pd(-0.0)));
  }
  scalar::imbalance_cost(act + i, forc + i, spot + i, sb + i, ss + i, out + i, n - i);
}

#else

[[noreturn]] static void unavailable() {
  throw std::logic_error("AVX2 kernels not compiled for this target");
}
void axpy(double, const double*, double*, std::size_t) { unavailable(); }
void scale(double, double*, std::size_t) { unavailable(); }
double dot(const double*, const double*, std::size_t) { unavailable(); }
void imbalance_cost(const double*, const double*, const double*, const double*, const double*,
                    double*, std::size_t) {
  unavailable();
}

#endif

}  // namespace hydrobal::simd::avx2
