#include "mfss/context.hpp"

#include <atomic>
#include <map>
#include <string>
#include <utility>

#include <spdlog/spdlog.h>

#include "mfss/errors.hpp"

namespace mfss {

namespace {

constexpr double kPinvRelTol = 1e-10;

std::atomic<bool> pinv_warned{false};

}  // namespace

ModelContext::ModelContext(VarParams params, const AggregationScheme& scheme,
                           const MixedFreqData& data, InitOptions init)
    : params_(std::move(params)),
      agg_(build_aggregation(scheme, params_.n_m(), params_.n_q(), params_.p())),
      data_(data),
      init_(init) {
  if (data.n_m() != params_.n_m() || data.n_q() != params_.n_q())
    throw ConfigError("data has " + std::to_string(data.n_m()) + " monthly and " +
                      std::to_string(data.n_q()) + " quarterly columns, parameters expect " +
                      std::to_string(params_.n_m()) + " and " + std::to_string(params_.n_q()));
  pattern_ = detect_pattern(data, params_.p());
  if (!params_.constant_cov() && static_cast<Index>(params_.cov_count()) != pattern_.T)
    throw ConfigError("time-varying covariance needs one factor per data row (" +
                      std::to_string(pattern_.T) + "), got " +
                      std::to_string(params_.cov_count()));

  const Index p = params_.p();
  const Index groups = p + 1;
  prior_ = init_state(params_, params_.n_q() * groups, init_);

  std::map<std::pair<IndexList, std::size_t>, SystemPtr> cache;
  for (Index row = p; row < pattern_.tb; ++row) {
    auto key = std::make_pair(pattern_.quarterly_observed[static_cast<std::size_t>(row)],
                              params_.cov_index(row));
    auto it = cache.find(key);
    if (it == cache.end()) {
      auto sys = std::make_shared<const StateSpaceSystem>(
          build_compact_system(params_, agg_, pattern_, row));
      it = cache.emplace(std::move(key), std::move(sys)).first;
    }
    compact_.push_back(it->second);
  }
  if (pattern_.tb < pattern_.T) {
    compact_tail_ = std::make_shared<const StateSpaceSystem>(
        build_compact_transition(params_, agg_, pattern_.tb));
    for (Index row = pattern_.tb; row < pattern_.T; ++row) {
      companion_.push_back(std::make_shared<const StateSpaceSystem>(
          companion_state_space(build_companion_system(params_, agg_, pattern_, row))));
      adaptive_.push_back(std::make_shared<const StateSpaceSystem>(build_adaptive_system(
          params_, agg_, adaptive_index(pattern_, params_.n_q(), row), row)));
    }
  }
}

SystemPtr ModelContext::compact(Index row) const {
  if (row < p() || row >= tb())
    throw FormulationError("no compact system at row " + std::to_string(row));
  return compact_[static_cast<std::size_t>(row - p())];
}

SystemPtr ModelContext::companion(Index row) const {
  if (row < tb() || row >= T())
    throw FormulationError("no companion system at row " + std::to_string(row));
  return companion_[static_cast<std::size_t>(row - tb())];
}

SystemPtr ModelContext::adaptive(Index row) const {
  if (row < tb()) return compact(row);
  if (row >= T()) throw FormulationError("no adaptive system at row " + std::to_string(row));
  return adaptive_[static_cast<std::size_t>(row - tb())];
}

Period make_period(const ModelContext& ctx, SystemPtr sys, const Mat& values, Index row) {
  Period per;
  per.row = row;
  const auto m = static_cast<Index>(sys->obs_vars.size());
  per.y.resize(m);
  for (Index r = 0; r < m; ++r) per.y(r) = values(row, sys->obs_vars[static_cast<std::size_t>(r)]);
  const Vec w = exogenous_vector(values, sys->exog_vars, row, ctx.p());
  per.c = sys->c0;
  if (w.size() > 0 && m > 0) per.c.noalias() += sys->C * w;
  per.d = sys->d0;
  if (w.size() > 0) per.d.noalias() += sys->D * w;
  per.sys = std::move(sys);
  return per;
}

FilterPass compact_filter(const ModelContext& ctx, const Mat& values, RunStats* stats) {
  std::vector<Period> periods;
  periods.reserve(static_cast<std::size_t>(ctx.tb() - ctx.p()));
  for (Index row = ctx.p(); row < ctx.tb(); ++row)
    periods.push_back(make_period(ctx, ctx.compact(row), values, row));
  if (stats) stats->compact_steps += static_cast<long>(periods.size());
  if (ctx.tb() == ctx.T()) return filter_pass(ctx.prior(), periods);
  const Period tail = make_period(ctx, ctx.compact_transition(), values, ctx.tb());
  return filter_pass(ctx.prior(), periods, &tail);
}

Mat monthly_skeleton(const ModelContext& ctx, const Mat& values) {
  Mat out = Mat::Constant(ctx.T(), ctx.n(), NAN);
  const Index n_m = ctx.params().n_m();
  for (Index r = 0; r < ctx.T(); ++r)
    for (Index i = 0; i < n_m; ++i)
      if (ctx.data().observed(r, i)) out(r, i) = values(r, i);
  return out;
}

void write_compact_rows(const ModelContext& ctx, const std::vector<Vec>& states, Mat& out) {
  const Index n_m = ctx.params().n_m();
  const Index n_q = ctx.params().n_q();
  const Index p = ctx.p();
  for (std::size_t i = 0; i < states.size(); ++i) {
    const Index row = p + static_cast<Index>(i);
    for (Index k = 0; k < n_q; ++k) out(row, n_m + k) = states[i](k);
  }
  if (states.empty()) return;
  for (Index lag = 1; lag <= p; ++lag)
    for (Index k = 0; k < n_q; ++k) out(p - lag, n_m + k) = states.front()(lag * n_q + k);
}

Mat smooth_compact_only(const ModelContext& ctx, const Mat& values, RunStats* stats) {
  const FilterPass pass = compact_filter(ctx, values, stats);
  const Index dim = pass.records.back().sys->state_dim();
  const SmoothPass sm = smooth_pass(pass.records, Vec::Zero(dim));
  Mat out = monthly_skeleton(ctx, values);
  write_compact_rows(ctx, sm.a_smooth, out);
  return out;
}

FilterState lift_compact_state(const ModelContext& ctx, const FilterState& compact_filtered,
                               const Mat& values, Index row) {
  const Index n = ctx.n();
  const Index n_m = ctx.params().n_m();
  const Index n_q = ctx.params().n_q();
  const Index groups = ctx.p() + 1;
  FilterState out{Vec::Zero(n * groups), Mat::Zero(n * groups, n * groups)};
  IndexList qpos;
  for (Index k = 0; k < groups; ++k) {
    const Index r = row - k;
    if (r >= 0) out.a.segment(k * n, n_m) = values.row(r).head(n_m).transpose();
    for (Index q = 0; q < n_q; ++q) {
      out.a(k * n + n_m + q) = compact_filtered.a(k * n_q + q);
      qpos.push_back(k * n + n_m + q);
    }
  }
  out.P(qpos, qpos) = compact_filtered.P;
  return out;
}

FilterState compact_to_companion(const ModelContext& ctx, const FilterState& compact_filtered,
                                 const Mat& values, Index row) {
  const FilterState lifted = lift_compact_state(ctx, compact_filtered, values, row);
  const SystemPtr next = ctx.companion(row + 1);
  return predict_from(lifted, *next, next->d0);
}

Vec companion_to_compact(const Vec& alpha_hat, const Vec& a_pred, const Mat& P_pred) {
  Index dropped = 0;
  Vec r = psd_pinv_solve(P_pred, alpha_hat - a_pred, kPinvRelTol, &dropped);
  if (dropped > 0) {
    if (!pinv_warned.exchange(true))
      spdlog::warn("predicted covariance at the balanced boundary is singular ({} of {} "
                   "directions); using the pseudo-inverse on its support",
                   dropped, P_pred.rows());
    else
      spdlog::debug("pseudo-inverse dropped {} directions", dropped);
  }
  return r;
}

Vec companion_quarterly_part(const ModelContext& ctx, const Vec& companion) {
  const Index n = ctx.n();
  const Index n_m = ctx.params().n_m();
  const Index n_q = ctx.params().n_q();
  const Index groups = ctx.p() + 1;
  Vec out(n_q * groups);
  for (Index k = 0; k < groups; ++k)
    for (Index q = 0; q < n_q; ++q) out(k * n_q + q) = companion(k * n + n_m + q);
  return out;
}

}  // namespace mfss
