#include "mfss/oracle.hpp"

#include <string>

#include "mfss/errors.hpp"

namespace mfss {

namespace {

void check_presample(const MixedFreqData& data, Index p) {
  if (data.T() <= p)
    throw PatternError("oracle: need more than p = " + std::to_string(p) + " rows");
  for (Index r = 0; r < p; ++r)
    for (Index i = 0; i < data.n_m(); ++i)
      if (!data.observed(r, i))
        throw PatternError("oracle: presample row " + std::to_string(r) +
                           " has a missing monthly value");
}

}  // namespace

OracleResult oracle_smooth(const VarParams& params, const Aggregation& agg,
                           const MixedFreqData& data, const InitOptions& init, Index cap) {
  const Index n = params.n();
  const Index n_m = params.n_m();
  const Index n_q = params.n_q();
  const Index p = params.p();
  const Index groups = p + 1;
  const Index dim = n * groups;
  if (dim > cap)
    throw OracleTooLargeError("oracle_smooth: state dimension " + std::to_string(dim) +
                              " exceeds the cap " + std::to_string(cap));
  check_presample(data, p);
  const ObservationPattern pattern = pattern_from_mask(data, p);
  const Mat& values = data.values();

  const FilterState prior_c = init_state(params, n_q * groups, init);
  FilterState prior{Vec::Zero(dim), Mat::Zero(dim, dim)};
  IndexList qpos;
  for (Index k = 0; k < groups; ++k) {
    const Index r = p - 1 - k;
    if (r >= 0) prior.a.segment(k * n, n_m) = values.row(r).head(n_m).transpose();
    for (Index q = 0; q < n_q; ++q) {
      prior.a(k * n + n_m + q) = prior_c.a(k * n_q + q);
      qpos.push_back(k * n + n_m + q);
    }
  }
  prior.P(qpos, qpos) = prior_c.P;

  std::vector<Period> periods;
  for (Index row = p; row < data.T(); ++row) {
    auto sys = std::make_shared<const StateSpaceSystem>(
        companion_state_space(build_companion_system(params, agg, pattern, row)));
    Period per;
    per.row = row;
    per.y.resize(sys->obs_dim());
    for (Index i = 0; i < sys->obs_dim(); ++i)
      per.y(i) = values(row, sys->obs_vars[static_cast<std::size_t>(i)]);
    per.c = Vec::Zero(sys->obs_dim());
    per.d = sys->d0;
    per.sys = std::move(sys);
    periods.push_back(std::move(per));
  }
  const FilterPass pass = filter_pass(prior, periods);
  const SmoothPass sm = smooth_pass(pass.records, Vec::Zero(dim));
  const std::vector<Mat> covs = smoothed_covariances(pass.records);

  OracleResult out;
  out.mean = Mat::Zero(data.T(), n);
  out.cov.assign(static_cast<std::size_t>(data.T()), Mat::Zero(n, n));
  for (Index row = p; row < data.T(); ++row) {
    const auto i = static_cast<std::size_t>(row - p);
    out.mean.row(row) = sm.a_smooth[i].head(n).transpose();
    out.cov[static_cast<std::size_t>(row)] = covs[i].topLeftCorner(n, n);
  }
  for (Index k = 1; k <= p; ++k) {
    out.mean.row(p - k) = sm.a_smooth.front().segment(k * n, n).transpose();
    out.cov[static_cast<std::size_t>(p - k)] = covs.front().block(k * n, k * n, n, n);
  }
  return out;
}

OracleResult oracle_joint(const VarParams& params, const Aggregation& agg,
                          const MixedFreqData& data, const InitOptions& init, Index cap) {
  const Index n = params.n();
  const Index n_m = params.n_m();
  const Index n_q = params.n_q();
  const Index p = params.p();
  const Index T = data.T();
  if (T * n > cap)
    throw OracleTooLargeError("oracle_joint: T*n = " + std::to_string(T * n) +
                              " exceeds the cap " + std::to_string(cap));
  check_presample(data, p);
  const Mat& values = data.values();

  // X = b + B xi with xi ~ N(0, I): presample quarterly factors, then e_p..e_{T-1}.
  const FilterState prior_c = init_state(params, n_q * (p + 1), init);
  const Index n_pre = n_q * p;
  const Mat pre_root = psd_sqrt(prior_c.P.topLeftCorner(n_pre, n_pre));
  const Index dim_xi = n_pre + n * (T - p);
  Vec b = Vec::Zero(T * n);
  Mat B = Mat::Zero(T * n, dim_xi);
  for (Index r = 0; r < p; ++r) {
    const Index k = p - 1 - r;
    for (Index i = 0; i < n_m; ++i) b(r * n + i) = values(r, i);
    for (Index q = 0; q < n_q; ++q) {
      b(r * n + n_m + q) = prior_c.a(k * n_q + q);
      B.row(r * n + n_m + q).head(n_pre) = pre_root.row(k * n_q + q);
    }
  }
  for (Index t = p; t < T; ++t) {
    b.segment(t * n, n) = params.intercept();
    for (Index j = 1; j <= p; ++j) {
      b.segment(t * n, n).noalias() += params.lag(j) * b.segment((t - j) * n, n);
      B.middleRows(t * n, n).noalias() += params.lag(j) * B.middleRows((t - j) * n, n);
    }
    B.block(t * n, n_pre + (t - p) * n, n, n) = params.chol(t);
  }

  std::vector<Vec> rows;
  std::vector<double> ys;
  for (Index t = p; t < T; ++t) {
    for (Index i = 0; i < n_m; ++i) {
      if (!data.observed(t, i)) continue;
      Vec a = Vec::Zero(T * n);
      a(t * n + i) = 1.0;
      rows.push_back(std::move(a));
      ys.push_back(values(t, i));
    }
    for (Index k = 0; k < n_q; ++k) {
      if (!data.observed(t, n_m + k)) continue;
      Vec a = Vec::Zero(T * n);
      for (Index l = 0; l < agg.p_q; ++l)
        for (Index k2 = 0; k2 < n_q; ++k2)
          if (t - l >= 0) a((t - l) * n + n_m + k2) += agg.lambda_qq(k, l * n_q + k2);
      rows.push_back(std::move(a));
      ys.push_back(values(t, n_m + k));
    }
  }
  const auto m = static_cast<Index>(rows.size());
  Mat sel(m, T * n);
  Vec y(m);
  for (Index r = 0; r < m; ++r) {
    sel.row(r) = rows[static_cast<std::size_t>(r)].transpose();
    y(r) = ys[static_cast<std::size_t>(r)];
  }
  const Mat A = sel * B;
  const Vec resid = y - sel * b;

  Eigen::CompleteOrthogonalDecomposition<Mat> cod(A);
  const Vec xi_hat = m > 0 ? Vec(cod.solve(resid)) : Vec(Vec::Zero(dim_xi));
  Mat null_proj = Mat::Identity(dim_xi, dim_xi);
  if (m > 0) null_proj -= cod.pseudoInverse() * A;
  const Vec mean = b + B * xi_hat;
  const Mat cov = B * null_proj * B.transpose();

  OracleResult out;
  out.mean.resize(T, n);
  out.cov.resize(static_cast<std::size_t>(T));
  for (Index t = 0; t < T; ++t) {
    out.mean.row(t) = mean.segment(t * n, n).transpose();
    Mat c = cov.block(t * n, t * n, n, n);
    symmetrize(c);
    out.cov[static_cast<std::size_t>(t)] = std::move(c);
  }
  return out;
}

Mat smooth_oracle(const ModelContext& ctx, const Mat& values, Index cap) {
  const MixedFreqData& d = ctx.data();
  const MixedFreqData data(values, d.n_m(), d.n_q(), d.calendar_offset(), false);
  Mat out = oracle_smooth(ctx.params(), ctx.agg(), data, ctx.init(), cap).mean;
  for (Index r = 0; r < ctx.T(); ++r)
    for (Index i = 0; i < d.n_m(); ++i)
      if (d.observed(r, i)) out(r, i) = values(r, i);
  return out;
}

}  // namespace mfss
