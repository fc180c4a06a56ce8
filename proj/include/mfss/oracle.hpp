#pragma once

#include "mfss/context.hpp"

namespace mfss {

/// Smoothed moments of every x_t. `cov[t]` is the n x n conditional covariance
/// of row t; observed monthly entries have (numerically) zero variance.
struct OracleResult {
  Mat mean;
  std::vector<Mat> cov;
};

/// Companion-form filter and smoother over all rows p..T-1. The first p rows
/// are the presample: their monthly values must be observed and quarterly
/// observations there are ignored. Any mask after the presample is accepted.
/// Throws OracleTooLargeError when n(p+1) exceeds `cap`.
OracleResult oracle_smooth(const VarParams& params, const Aggregation& agg,
                           const MixedFreqData& data, const InitOptions& init = {},
                           Index cap = 60);

/// Direct conditioning of the stacked Gaussian (X, Y) built from the VAR
/// recursion. Throws OracleTooLargeError when T*n exceeds `cap`.
OracleResult oracle_joint(const VarParams& params, const Aggregation& agg,
                          const MixedFreqData& data, const InitOptions& init = {},
                          Index cap = 200);

/// oracle_smooth applied to the context's model and mask with new values.
Mat smooth_oracle(const ModelContext& ctx, const Mat& values, Index cap = 60);

}  // namespace mfss
