#include "mfss/adaptive.hpp"

#include "mfss/errors.hpp"

namespace mfss {

Mat smooth_adaptive(const ModelContext& ctx, const Mat& values, RunStats* stats) {
  if (ctx.pattern().balanced()) return smooth_compact_only(ctx, values, stats);

  std::vector<Period> periods;
  periods.reserve(static_cast<std::size_t>(ctx.T() - ctx.p()));
  for (Index row = ctx.p(); row < ctx.T(); ++row)
    periods.push_back(make_period(ctx, ctx.adaptive(row), values, row));
  const FilterPass pass = filter_pass(ctx.prior(), periods);
  for (std::size_t i = 1; i < pass.records.size(); ++i)
    if (pass.records[i - 1].K.rows() != pass.records[i].sys->state_dim())
      throw FormulationError("adaptive gain does not match the next state dimension");
  if (stats) {
    stats->compact_steps += static_cast<long>(ctx.tb() - ctx.p());
    stats->adaptive_steps += static_cast<long>(ctx.T() - ctx.tb());
  }
  const Index dim = pass.records.back().sys->state_dim();
  const SmoothPass sm = smooth_pass(pass.records, Vec::Zero(dim));

  Mat out = monthly_skeleton(ctx, values);
  const auto n_bal = static_cast<std::size_t>(ctx.tb() - ctx.p());
  write_compact_rows(ctx, {sm.a_smooth.begin(), sm.a_smooth.begin() + n_bal}, out);
  const Index n_m = ctx.params().n_m();
  const Index n_q = ctx.params().n_q();
  for (Index row = ctx.tb(); row < ctx.T(); ++row) {
    const Vec& a = sm.a_smooth[static_cast<std::size_t>(row - ctx.p())];
    const IndexList& aug = ctx.pattern().unobserved[static_cast<std::size_t>(row)];
    const auto na = static_cast<Index>(aug.size());
    for (Index h = 0; h < na; ++h) out(row, aug[static_cast<std::size_t>(h)]) = a(h);
    for (Index k = 0; k < n_q; ++k) out(row, n_m + k) = a(na + k);
  }
  return out;
}

std::uint64_t mult_count(std::uint64_t rows, std::uint64_t inner) {
  const std::uint64_t r3 = rows * rows * rows;
  const std::uint64_t i3 = inner * inner * inner;
  return r3 * i3;
}

std::uint64_t flop_count(std::uint64_t rows, std::uint64_t inner) {
  return rows * inner * (inner + rows);
}

}  // namespace mfss
