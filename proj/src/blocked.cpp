#include "mfss/blocked.hpp"

#include <cmath>

#include "mfss/baseline.hpp"
#include "mfss/errors.hpp"

namespace mfss {

namespace {

struct BlockedRecord {
  BlockedObs obs;
  Vec a_pred;
  Mat P_pred;
  Vec a_filt;
  Vec finv_v;
  Mat B;
  bool has_next = false;
};

Vec observe(const Vec& a, const BlockedObs& obs, const BlockedLayout& lay) {
  Vec out(obs.size());
  const auto om = static_cast<Index>(obs.monthly.size());
  for (Index i = 0; i < om; ++i) out(i) = a(obs.monthly[static_cast<std::size_t>(i)]);
  if (!obs.quarterly.empty()) out.tail(obs.size() - om) = obs.lambda_sel * a(lay.qlags);
  return out;
}

}  // namespace

BlockedLayout BlockedLayout::make(const Aggregation& agg) {
  BlockedLayout lay;
  lay.n_m = agg.n_m;
  lay.n_q = agg.n_q;
  lay.n = agg.n_m + agg.n_q;
  lay.p = agg.p;
  lay.qlags = agg.quarterly_positions(lay.n, lay.n_m);
  return lay;
}

BlockedObs BlockedObs::make(const Aggregation& agg, const ObservationPattern& pattern, Index row) {
  BlockedObs obs;
  obs.monthly = pattern.observed[static_cast<std::size_t>(row)];
  obs.quarterly = pattern.quarterly_observed[static_cast<std::size_t>(row)];
  obs.lambda_sel = agg.lambda_qq(obs.quarterly, Eigen::all);
  return obs;
}

Mat blocked_F(const Mat& P, const BlockedLayout& lay, const BlockedObs& obs, Mat* bracket) {
  const auto om = static_cast<Index>(obs.monthly.size());
  const auto mq = static_cast<Index>(obs.quarterly.size());
  Mat br = P(Eigen::all, lay.qlags) * obs.lambda_sel.transpose();
  Mat f(om + mq, om + mq);
  f.topLeftCorner(om, om) = P(obs.monthly, obs.monthly);
  if (mq > 0) {
    f.topRightCorner(om, mq) = br(obs.monthly, Eigen::all);
    f.bottomLeftCorner(mq, om) = f.topRightCorner(om, mq).transpose();
    f.bottomRightCorner(mq, mq) = obs.lambda_sel * br(lay.qlags, Eigen::all);
    symmetrize(f);
  }
  if (bracket) *bracket = std::move(br);
  return f;
}

Mat blocked_M(const Mat& P, const BlockedObs& obs, const Mat& bracket) {
  const auto om = static_cast<Index>(obs.monthly.size());
  Mat m(P.rows(), om + bracket.cols());
  m.leftCols(om) = P(Eigen::all, obs.monthly);
  m.rightCols(bracket.cols()) = bracket;
  return m;
}

Mat blocked_K(const Mat& B, const Mat& pi, const BlockedLayout& lay) {
  const Index n = lay.n;
  Mat k(lay.dim(), B.cols());
  k.topRows(n) = pi * B;
  k.bottomRows(n * lay.p) = B;
  return k;
}

Mat blocked_L(const Mat& K, const Mat& pi, const BlockedLayout& lay, const BlockedObs& obs,
              long long* mults) {
  const Index n = lay.n;
  const Index dim = lay.dim();
  Mat l = Mat::Zero(dim, dim);
  l.topLeftCorner(n, n * lay.p) = pi;
  l.bottomLeftCorner(n * lay.p, n * lay.p).setIdentity();
  const auto om = static_cast<Index>(obs.monthly.size());
  for (Index i = 0; i < om; ++i) l.col(obs.monthly[static_cast<std::size_t>(i)]) -= K.col(i);
  const auto mq = static_cast<Index>(obs.quarterly.size());
  if (mq > 0) {
    l(Eigen::all, lay.qlags) -= K.rightCols(mq) * obs.lambda_sel;
    if (mults) *mults += static_cast<long long>(dim) * mq * static_cast<Index>(lay.qlags.size());
  }
  return l;
}

FilterState blocked_predict(const Vec& a_filt, const Mat& P_filt, const Mat& pi,
                            const Mat& sigma, const Vec& intercept, long long* mults) {
  const Index n = pi.rows();
  const Index np = pi.cols();
  FilterState out{Vec(n + np), Mat(n + np, n + np)};
  out.a.head(n).noalias() = pi * a_filt.head(np);
  if (intercept.size() > 0) out.a.head(n) += intercept;
  out.a.tail(np) = a_filt.head(np);

  const Mat bracket = pi * P_filt.topLeftCorner(np, np);
  out.P.topLeftCorner(n, n).noalias() = bracket * pi.transpose();
  out.P.topLeftCorner(n, n) += sigma;
  out.P.topRightCorner(n, np) = bracket;
  out.P.bottomLeftCorner(np, n) = bracket.transpose();
  out.P.bottomRightCorner(np, np) = P_filt.topLeftCorner(np, np);
  auto tl = out.P.topLeftCorner(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = j + 1; i < n; ++i) tl(j, i) = tl(i, j);
  if (mults) *mults += static_cast<long long>(n) * np * np + static_cast<long long>(n) * np * n;
  return out;
}

Vec blocked_Zt_times(const Vec& x, const BlockedLayout& lay, const BlockedObs& obs) {
  Vec out = Vec::Zero(lay.dim());
  const auto om = static_cast<Index>(obs.monthly.size());
  for (Index i = 0; i < om; ++i) out(obs.monthly[static_cast<std::size_t>(i)]) += x(i);
  if (!obs.quarterly.empty())
    out(lay.qlags) += obs.lambda_sel.transpose() * x.tail(x.size() - om);
  return out;
}

Vec blocked_Lt_times(const Mat& B, const Mat& pi, const Vec& r, const BlockedLayout& lay,
                     const BlockedObs& obs) {
  const Index n = lay.n;
  const Index np = n * lay.p;
  // T'r = (Pi' r_1 + r_{2:p+1}; 0) and K'r = B'(Pi' r_1 + r_{2:p+1}).
  Vec u = pi.transpose() * r.head(n);
  u += r.segment(n, np);
  Vec out = Vec::Zero(lay.dim());
  out.head(np) = u;
  if (obs.size() > 0) out -= blocked_Zt_times(B.transpose() * u, lay, obs);
  return out;
}

Vec blocked_smooth_r(const Mat& B, const Mat& pi, const Vec& r, const Vec& finv_v,
                     const BlockedLayout& lay, const BlockedObs& obs) {
  return blocked_Lt_times(B, pi, r, lay, obs) + blocked_Zt_times(finv_v, lay, obs);
}

Mat smooth_blocked(const ModelContext& ctx, const Mat& values, RunStats* stats) {
  if (ctx.pattern().balanced()) return smooth_compact_only(ctx, values, stats);

  const VarParams& params = ctx.params();
  const BlockedLayout lay = BlockedLayout::make(ctx.agg());
  const Index np = lay.n * lay.p;
  const Mat& pi = params.lags();

  const FilterPass compact = compact_filter(ctx, values, stats);
  const FilterRecord& last = compact.records.back();
  const FilterState lifted =
      lift_compact_state(ctx, {last.a_filt, last.P_filt}, values, ctx.tb() - 1);

  long long mults = 0;
  std::vector<BlockedRecord> recs;
  FilterState state = blocked_predict(lifted.a, lifted.P, pi, params.sigma(ctx.tb()),
                                      params.intercept(), &mults);
  for (Index row = ctx.tb(); row < ctx.T(); ++row) {
    BlockedRecord rec;
    rec.obs = BlockedObs::make(ctx.agg(), ctx.pattern(), row);
    rec.a_pred = std::move(state.a);
    rec.P_pred = std::move(state.P);
    const Index m = rec.obs.size();
    if (m > 0) {
      Mat bracket;
      const Mat f = blocked_F(rec.P_pred, lay, rec.obs, &bracket);
      const Mat mm = blocked_M(rec.P_pred, rec.obs, bracket);
      Eigen::LLT<Mat> llt(f);
      if (llt.info() != Eigen::Success) throw SingularInnovationError(row, INFINITY);
      const auto diag = llt.matrixLLT().diagonal();
      const double cond = std::pow(diag.maxCoeff() / diag.minCoeff(), 2);
      if (!(cond <= 1e12)) throw SingularInnovationError(row, cond);

      Vec y(m);
      for (Index i = 0; i < m; ++i)
        y(i) = values(row, i < static_cast<Index>(rec.obs.monthly.size())
                               ? rec.obs.monthly[static_cast<std::size_t>(i)]
                               : lay.n_m + rec.obs.quarterly[static_cast<std::size_t>(
                                               i - static_cast<Index>(rec.obs.monthly.size()))]);
      rec.finv_v = llt.solve(y - observe(rec.a_pred, rec.obs, lay));
      rec.a_filt = rec.a_pred + mm * rec.finv_v;

      // P - M F^{-1} M' as a symmetric rank-m downdate, upper half copied.
      const Mat half = llt.matrixL().solve(mm.transpose());
      Mat p_filt = rec.P_pred;
      p_filt.selfadjointView<Eigen::Lower>().rankUpdate(half.transpose(), -1.0);
      for (Index j = 0; j < p_filt.cols(); ++j)
        for (Index i = j + 1; i < p_filt.rows(); ++i) p_filt(j, i) = p_filt(i, j);
      rec.B = llt.matrixU().solve(half).leftCols(np).transpose();
      if (row + 1 < ctx.T())
        state = blocked_predict(rec.a_filt, p_filt, pi, params.sigma(row + 1), params.intercept(),
                                &mults);
    } else {
      rec.finv_v = Vec(0);
      rec.a_filt = rec.a_pred;
      rec.B = Mat(np, 0);
      if (row + 1 < ctx.T())
        state = blocked_predict(rec.a_filt, rec.P_pred, pi, params.sigma(row + 1),
                                params.intercept(), &mults);
    }
    rec.has_next = row + 1 < ctx.T();
    recs.push_back(std::move(rec));
  }
  if (stats) {
    stats->companion_steps += static_cast<long>(recs.size());
    stats->blocked_mults += mults;
  }

  std::vector<Vec> smoothed(recs.size());
  Vec r = Vec::Zero(lay.dim());
  for (std::size_t i = recs.size(); i-- > 0;) {
    const BlockedRecord& rec = recs[i];
    if (rec.has_next) {
      const Vec lr = blocked_Lt_times(rec.B, pi, r, lay, rec.obs);
      smoothed[i] = rec.a_filt + rec.P_pred * lr;
      r = lr + blocked_Zt_times(rec.finv_v, lay, rec.obs);
    } else {
      smoothed[i] = rec.a_filt;
      r = blocked_Zt_times(rec.finv_v, lay, rec.obs);
    }
  }

  const Vec alpha_hat = companion_quarterly_part(ctx, smoothed.front());
  const Vec r_tb = companion_to_compact(alpha_hat, compact.tail_pred->a, compact.tail_pred->P);
  const SmoothPass compact_sm = smooth_pass(compact.records, r_tb);

  Mat out = monthly_skeleton(ctx, values);
  write_compact_rows(ctx, compact_sm.a_smooth, out);
  write_companion_rows(ctx, smoothed, out);
  return out;
}

}  // namespace mfss
