#pragma once

#include <cstdint>

#include "mfss/context.hpp"

namespace mfss {

/// One pass of the filter and smoother over rows p..T-1 with the adaptive
/// systems: compact below T_b, state augmented by the unobserved monthly
/// variables on the edge. No companion form is built.
Mat smooth_adaptive(const ModelContext& ctx, const Mat& values, RunStats* stats = nullptr);

/// Scalar multiplications for the triple product of a (rows x inner) matrix,
/// an (inner x inner) matrix and the transpose, tallied as rows^3 * inner^3.
std::uint64_t mult_count(std::uint64_t rows, std::uint64_t inner);

/// Conventional count for the same product: rows*inner*(inner+rows).
std::uint64_t flop_count(std::uint64_t rows, std::uint64_t inner);

}  // namespace mfss
