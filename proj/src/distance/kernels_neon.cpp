// aarch64 only; NEON is part of the base ISA there.
#include <arm_neon.h>

#include "kernels_internal.hpp"

namespace hg::distance::kernels {

namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double squared_norm_neon(const double* a, std::size_t n) { return dot_neon(a, a, n); }

void accumulate_neon(double* dst, const double* src, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(dst + i, vaddq_f64(vld1q_f64(dst + i), vld1q_f64(src + i)));
  for (; i < n; ++i) dst[i] += src[i];
}

void cosine_terms_neon(const double* a, const double* b, std::size_t n, double out[3]) {
  float64x2_t ab = vdupq_n_f64(0.0), aa = vdupq_n_f64(0.0), bb = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t va = vld1q_f64(a + i);
    const float64x2_t vb = vld1q_f64(b + i);
    ab = vfmaq_f64(ab, va, vb);
    aa = vfmaq_f64(aa, va, va);
    bb = vfmaq_f64(bb, vb, vb);
  }
  double sab = vaddvq_f64(ab), saa = vaddvq_f64(aa), sbb = vaddvq_f64(bb);
  for (; i < n; ++i) {
    sab += a[i] * b[i];
    saa += a[i] * a[i];
    sbb += b[i] * b[i];
  }
  out[0] = sab;
  out[1] = saa;
  out[2] = sbb;
}

constexpr KernelSet kNeon{"neon", dot_neon, squared_norm_neon, accumulate_neon,
                          cosine_terms_neon};

}  // namespace

namespace detail {
const KernelSet* neon_kernels() { return &kNeon; }
}  // namespace detail

}  // namespace hg::distance::kernels
