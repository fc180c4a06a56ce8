#include "mfss/baseline.hpp"

namespace mfss {

void write_companion_rows(const ModelContext& ctx, const std::vector<Vec>& states, Mat& out) {
  const Index n_m = ctx.params().n_m();
  for (std::size_t i = 0; i < states.size(); ++i) {
    const Index row = ctx.tb() + static_cast<Index>(i);
    for (Index c = 0; c < ctx.n(); ++c)
      if (c >= n_m || !ctx.data().observed(row, c)) out(row, c) = states[i](c);
  }
}

Mat smooth_baseline(const ModelContext& ctx, const Mat& values, RunStats* stats) {
  if (ctx.pattern().balanced()) return smooth_compact_only(ctx, values, stats);

  const FilterPass compact = compact_filter(ctx, values, stats);
  const FilterRecord& last = compact.records.back();
  const FilterState lifted =
      lift_compact_state(ctx, {last.a_filt, last.P_filt}, values, ctx.tb() - 1);

  std::vector<Period> periods;
  for (Index row = ctx.tb(); row < ctx.T(); ++row)
    periods.push_back(make_period(ctx, ctx.companion(row), values, row));
  if (stats) stats->companion_steps += static_cast<long>(periods.size());
  const FilterPass edge = filter_pass(lifted, periods);
  const Index dim = edge.records.back().sys->state_dim();
  const SmoothPass edge_sm = smooth_pass(edge.records, Vec::Zero(dim));

  const Vec alpha_hat = companion_quarterly_part(ctx, edge_sm.a_smooth.front());
  const Vec r = companion_to_compact(alpha_hat, compact.tail_pred->a, compact.tail_pred->P);
  const SmoothPass compact_sm = smooth_pass(compact.records, r);

  Mat out = monthly_skeleton(ctx, values);
  write_compact_rows(ctx, compact_sm.a_smooth, out);
  write_companion_rows(ctx, edge_sm.a_smooth, out);
  return out;
}

}  // namespace mfss
