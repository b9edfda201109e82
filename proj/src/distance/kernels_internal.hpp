#pragma once

#include "hg/distance/kernels.hpp"

namespace hg::distance::kernels::detail {

// Null when the variant is not compiled into this build.
const KernelSet* avx2_kernels();
const KernelSet* neon_kernels();

}  // namespace hg::distance::kernels::detail
