// Built with -mavx2 -mfma; only reached through avx2_table() after a CPU check.
#include <immintrin.h>

#include <cmath>
#include <limits>

#include "riccap/kernels.hpp"

namespace riccap::kernels {
namespace {

double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void gemv(const double* M, std::size_t rows, std::size_t cols, const double* in, double* out,
          std::size_t lanes, bool accumulate) {
  const std::size_t wide = lanes & ~std::size_t{7};
  for (std::size_t r = 0; r < rows; ++r) {
    const double* mrow = M + r * cols;
    double* dst = out + r * lanes;
    std::size_t p = 0;
    for (; p < wide; p += 8) {
      __m256d a0 = accumulate ? _mm256_loadu_pd(dst + p) : _mm256_setzero_pd();
      __m256d a1 = accumulate ? _mm256_loadu_pd(dst + p + 4) : _mm256_setzero_pd();
      for (std::size_t c = 0; c < cols; ++c) {
        const __m256d m = _mm256_broadcast_sd(mrow + c);
        const double* src = in + c * lanes + p;
        a0 = _mm256_fmadd_pd(m, _mm256_loadu_pd(src), a0);
        a1 = _mm256_fmadd_pd(m, _mm256_loadu_pd(src + 4), a1);
      }
      _mm256_storeu_pd(dst + p, a0);
      _mm256_storeu_pd(dst + p + 4, a1);
    }
    for (; p < lanes; ++p) {
      double acc = accumulate ? dst[p] : 0.0;
      for (std::size_t c = 0; c < cols; ++c) acc = std::fma(mrow[c], in[c * lanes + p], acc);
      dst[p] = acc;
    }
  }
}

double sum(const double* x, std::size_t n) {
  __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 = _mm256_add_pd(a0, _mm256_loadu_pd(x + i));
    a1 = _mm256_add_pd(a1, _mm256_loadu_pd(x + i + 4));
  }
  double acc = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) acc += x[i];
  return acc;
}

double dot(const double* x, const double* y, std::size_t n) {
  __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), a0);
    a1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), a1);
  }
  double acc = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) acc = std::fma(x[i], y[i], acc);
  return acc;
}

double max_abs(const double* x, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  const __m256d zero = _mm256_setzero_pd();
  __m256d m = zero;
  // x·0 is NaN exactly when x is inf or NaN.
  __m256d poison = zero;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    m = _mm256_max_pd(m, _mm256_andnot_pd(sign, v));
    poison = _mm256_add_pd(poison, _mm256_mul_pd(v, zero));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double best = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  if (std::isnan(hsum(poison))) return std::numeric_limits<double>::infinity();
  for (; i < n; ++i) {
    if (!std::isfinite(x[i])) return std::numeric_limits<double>::infinity();
    best = std::max(best, std::abs(x[i]));
  }
  return best;
}

constexpr KernelTable kTable{"avx2", &gemv, &sum, &dot, &max_abs};

}  // namespace

const KernelTable* avx2_table_unchecked() { return &kTable; }

}  // namespace riccap::kernels
