#pragma once

#include "mfss/context.hpp"

namespace mfss {

/// Compact filtering over the balanced rows, companion filtering and
/// smoothing over the ragged edge, then compact smoothing started from the
/// companion smoothed state at T_b. Returns T x n smoothed means with observed
/// monthly entries taken from `values`.
Mat smooth_baseline(const ModelContext& ctx, const Mat& values, RunStats* stats = nullptr);

/// Writes the leading n entries of companion states for rows T_b.. into
/// `out`, leaving observed monthly entries untouched.
void write_companion_rows(const ModelContext& ctx, const std::vector<Vec>& states, Mat& out);

}  // namespace mfss
