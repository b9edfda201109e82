#include <atomic>
#include <cstdlib>

#include "kernels_internal.hpp"

namespace hg::distance::kernels {

namespace detail {
#ifndef HG_HAVE_AVX2
const KernelSet* avx2_kernels() { return nullptr; }
#endif
#ifndef HG_HAVE_NEON
const KernelSet* neon_kernels() { return nullptr; }
#endif
}  // namespace detail

namespace {

bool cpu_has_avx2() {
#if defined(HG_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelSet* find(std::string_view name) {
  for (const KernelSet* k : available()) {
    if (k->name == name) return k;
  }
  return nullptr;
}

const KernelSet* initial() {
  if (const char* forced = std::getenv("HG_SIMD")) {
    if (const KernelSet* k = find(forced)) return k;
  }
  return available().back();
}

std::atomic<const KernelSet*>& slot() {
  static std::atomic<const KernelSet*> current{initial()};
  return current;
}

}  // namespace

std::vector<const KernelSet*> available() {
  std::vector<const KernelSet*> out{&scalar()};
  if (const KernelSet* k = detail::avx2_kernels(); k && cpu_has_avx2()) out.push_back(k);
  if (const KernelSet* k = detail::neon_kernels()) out.push_back(k);
  return out;
}

const KernelSet& active() { return *slot().load(std::memory_order_acquire); }

bool select(std::string_view name) {
  const KernelSet* k = find(name);
  if (!k) return false;
  slot().store(k, std::memory_order_release);
  return true;
}

}  // namespace hg::distance::kernels
