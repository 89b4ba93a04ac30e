#pragma once

#include "ptint/kernels.hpp"

namespace ptint::kernels::detail {

const Table& scalar_table_impl();
/// Defined only when the AVX2 translation unit is compiled in.
const Table* avx2_table_impl();
const Table* neon_table_impl();

}  // namespace ptint::kernels::detail
