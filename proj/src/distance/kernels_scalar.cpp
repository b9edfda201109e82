#include "hg/distance/kernels.hpp"

namespace hg::distance::kernels {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double squared_norm_scalar(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * a[i];
  return s;
}

void accumulate_scalar(double* dst, const double* src, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] += src[i];
}

void cosine_terms_scalar(const double* a, const double* b, std::size_t n, double out[3]) {
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  out[0] = ab;
  out[1] = aa;
  out[2] = bb;
}

constexpr KernelSet kScalar{"scalar", dot_scalar, squared_norm_scalar, accumulate_scalar,
                            cosine_terms_scalar};

}  // namespace

const KernelSet& scalar() { return kScalar; }

}  // namespace hg::distance::kernels
