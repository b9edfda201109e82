#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace hg::distance::kernels {

// Inner loops of the vector-space metrics. Every variant must agree with the
// scalar reference up to floating-point reassociation.
struct KernelSet {
  std::string_view name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*squared_norm)(const double* a, std::size_t n);
  // dst[i] += src[i]
  void (*accumulate)(double* dst, const double* src, std::size_t n);
  // out = {a.b, a.a, b.b} in one pass.
  void (*cosine_terms)(const double* a, const double* b, std::size_t n, double out[3]);
};

const KernelSet& scalar();

// Variants compiled into this binary and supported by the running CPU,
// scalar first.
std::vector<const KernelSet*> available();

// Best available variant, chosen once. HG_SIMD=scalar|avx2|neon forces one.
const KernelSet& active();

// Overrides the active variant (tests and benchmarks). Returns false if the
// name is unknown or unsupported here.
bool select(std::string_view name);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline double squared_norm(std::span<const double> a) {
  return active().squared_norm(a.data(), a.size());
}

inline void accumulate(std::span<double> dst, std::span<const double> src) {
  active().accumulate(dst.data(), src.data(), dst.size());
}

}  // namespace hg::distance::kernels
