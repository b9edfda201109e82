// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include "kernels_internal.hpp"

namespace hg::distance::kernels {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double squared_norm_avx2(const double* a, std::size_t n) { return dot_avx2(a, a, n); }

void accumulate_avx2(double* dst, const double* src, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(dst + i, _mm256_add_pd(_mm256_loadu_pd(dst + i), _mm256_loadu_pd(src + i)));
  }
  for (; i < n; ++i) dst[i] += src[i];
}

void cosine_terms_avx2(const double* a, const double* b, std::size_t n, double out[3]) {
  __m256d ab = _mm256_setzero_pd();
  __m256d aa = _mm256_setzero_pd();
  __m256d bb = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d va = _mm256_loadu_pd(a + i);
    const __m256d vb = _mm256_loadu_pd(b + i);
    ab = _mm256_fmadd_pd(va, vb, ab);
    aa = _mm256_fmadd_pd(va, va, aa);
    bb = _mm256_fmadd_pd(vb, vb, bb);
  }
  double sab = hsum(ab), saa = hsum(aa), sbb = hsum(bb);
  for (; i < n; ++i) {
    sab += a[i] * b[i];
    saa += a[i] * a[i];
    sbb += b[i] * b[i];
  }
  out[0] = sab;
  out[1] = saa;
  out[2] = sbb;
}

constexpr KernelSet kAvx2{"avx2", dot_avx2, squared_norm_avx2, accumulate_avx2,
                          cosine_terms_avx2};

}  // namespace

namespace detail {
const KernelSet* avx2_kernels() { return &kAvx2; }
}  // namespace detail

}  // namespace hg::distance::kernels
