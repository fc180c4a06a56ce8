#pragma once

#include <memory>
#include <vector>

#include "mfss/kalman.hpp"

namespace mfss {

/// Instrumentation shared by the backends.
struct RunStats {
  long compact_steps = 0;
  long companion_steps = 0;
  long adaptive_steps = 0;
  // Scalar multiplications spent in blocked predictions.
  long long blocked_mults = 0;
};

/// Everything about a smoothing problem that does not depend on the data
/// values: parameters, aggregation, observation pattern, prior and the
/// per-row system matrices. Immutable after construction and shared across
/// draws and threads.
class ModelContext {
 public:
  ModelContext(VarParams params, const AggregationScheme& scheme, const MixedFreqData& data,
               InitOptions init = {});

  const VarParams& params() const { return params_; }
  const Aggregation& agg() const { return agg_; }
  const ObservationPattern& pattern() const { return pattern_; }
  const MixedFreqData& data() const { return data_; }
  const InitOptions& init() const { return init_; }
  // Distribution of the compact state at row p-1 (quarterly values at rows
  // p-1, ..., -1).
  const FilterState& prior() const { return prior_; }

  Index T() const { return pattern_.T; }
  Index n() const { return params_.n(); }
  Index p() const { return params_.p(); }
  Index tb() const { return pattern_.tb; }

  // Compact system at a balanced row p <= row < T_b.
  SystemPtr compact(Index row) const;
  // Compact transition into row T_b (null when the panel is balanced).
  SystemPtr compact_transition() const { return compact_tail_; }
  // Companion system at an edge row T_b <= row < T.
  SystemPtr companion(Index row) const;
  // Adaptive system at p <= row < T; the same object as compact(row) below T_b.
  SystemPtr adaptive(Index row) const;

 private:
  VarParams params_;
  Aggregation agg_;
  MixedFreqData data_;
  ObservationPattern pattern_;
  InitOptions init_;
  FilterState prior_;
  std::vector<SystemPtr> compact_;
  SystemPtr compact_tail_;
  std::vector<SystemPtr> companion_;
  std::vector<SystemPtr> adaptive_;
};

using ContextPtr = std::shared_ptr<const ModelContext>;

/// Observation, exogenous constants and state constant of `sys` at `row`,
/// read from `values` (T x n, same mask as the context data).
Period make_period(const ModelContext& ctx, SystemPtr sys, const Mat& values, Index row);

/// Forward pass over the balanced rows p..T_b-1 in compact form. When the
/// panel is unbalanced the last record also predicts into row T_b.
FilterPass compact_filter(const ModelContext& ctx, const Mat& values, RunStats* stats);

/// Smoothed means from compact states: quarterly columns for rows p..T_b-1
/// plus the presample rows recovered from the lags of the state at row p.
void write_compact_rows(const ModelContext& ctx, const std::vector<Vec>& states, Mat& out);

/// Fully balanced case shared verbatim by all backends.
Mat smooth_compact_only(const ModelContext& ctx, const Mat& values, RunStats* stats);

/// T x n matrix holding the observed monthly values and NaN elsewhere.
Mat monthly_skeleton(const ModelContext& ctx, const Mat& values);

/// Lifts the compact filtered state at row T_b-1 to the companion layout:
/// monthly positions take the observed values with zero variance.
FilterState lift_compact_state(const ModelContext& ctx, const FilterState& compact_filtered,
                               const Mat& values, Index row);

/// Lift followed by one companion prediction into row+1.
FilterState compact_to_companion(const ModelContext& ctx, const FilterState& compact_filtered,
                                 const Mat& values, Index row);

/// r = P^+ (alpha_hat - a), a pseudo-inverse solve on the support of P.
Vec companion_to_compact(const Vec& alpha_hat, const Vec& a_pred, const Mat& P_pred);

/// Quarterly entries of a companion-layout vector, in compact order.
Vec companion_quarterly_part(const ModelContext& ctx, const Vec& companion);

}  // namespace mfss
