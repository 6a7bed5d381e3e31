#pragma once

#include "ascnet/kernels/kernels.hpp"

namespace ascnet::kernels {

// Defined in kernels_avx2.cpp (compiled with -mavx2 -mfma); null when the
// build has no AVX2 translation unit.
const Ops* avx2_ops_table();

}  // namespace ascnet::kernels
