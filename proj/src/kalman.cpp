#include "mfss/kalman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "mfss/errors.hpp"

namespace mfss {

Mat FilterRecord::L() const { return next->T - K * sys->Z; }

Mat FilterRecord::N() const { return P_pred * L().transpose() - sys->S * K.transpose(); }

Vec FilterRecord::Lt_times(const Vec& r) const {
  const Vec kr = K.transpose() * r;
  return next->T.transpose() * r - sys->Z.transpose() * kr;
}

Vec FilterRecord::N_times(const Vec& r) const {
  const Vec kr = K.transpose() * r;
  const Vec lr = next->T.transpose() * r - sys->Z.transpose() * kr;
  return P_pred * lr - sys->S * kr;
}

Vec FilterRecord::observation_score() const { return sys->Z.transpose() * finv_v; }

FilterRecord filter_update(const FilterState& pred, SystemPtr sys, const Vec& y, const Vec& c,
                           long period, double max_condition) {
  FilterRecord rec;
  rec.period = period;
  rec.a_pred = pred.a;
  rec.P_pred = pred.P;
  const Index m = sys->obs_dim();
  const Index dim = sys->state_dim();
  rec.sys = std::move(sys);
  const StateSpaceSystem& s = *rec.sys;
  if (m == 0) {
    rec.v = Vec(0);
    rec.finv_v = Vec(0);
    rec.M = Mat(dim, 0);
    rec.F = Mat(0, 0);
    rec.a_filt = pred.a;
    rec.P_filt = pred.P;
    return rec;
  }

  rec.v = y - s.Z * pred.a - c;
  rec.M = pred.P * s.Z.transpose() + s.S;
  rec.F = s.Z * rec.M + s.R + s.S.transpose() * s.Z.transpose();
  symmetrize(rec.F);

  Eigen::LLT<Mat> llt(rec.F);
  if (llt.info() != Eigen::Success)
    throw SingularInnovationError(period, std::numeric_limits<double>::infinity());
  const auto diag = llt.matrixLLT().diagonal();
  const double lo = diag.minCoeff();
  const double cond = lo > 0.0 ? std::pow(diag.maxCoeff() / lo, 2) : INFINITY;
  if (!(cond <= max_condition)) throw SingularInnovationError(period, cond);

  rec.finv_v = llt.solve(rec.v);
  // M F^{-1}, kept for the gain computed against the next transition.
  rec.K = llt.solve(rec.M.transpose()).transpose();
  rec.a_filt = pred.a + rec.M * rec.finv_v;
  rec.P_filt = pred.P - rec.K * rec.M.transpose();
  symmetrize(rec.P_filt);
  return rec;
}

FilterState filter_predict(FilterRecord& rec, SystemPtr next, const Vec& d_next) {
  const Mat& t = next->T;
  FilterState out;
  out.a = t * rec.a_filt + d_next;
  out.P = t * rec.P_filt * t.transpose() + next->Q;
  symmetrize(out.P);
  // rec.K holds M F^{-1} until the next transition is known.
  if (rec.K.cols() > 0)
    rec.K = t * rec.K;
  else
    rec.K = Mat(t.rows(), 0);
  rec.next = std::move(next);
  return out;
}

FilterState predict_from(const FilterState& prior, const StateSpaceSystem& next, const Vec& d_next) {
  FilterState out;
  out.a = next.T * prior.a + d_next;
  out.P = next.T * prior.P * next.T.transpose() + next.Q;
  symmetrize(out.P);
  return out;
}

std::pair<std::optional<FilterState>, FilterRecord> filter_step(const FilterState& pred,
                                                                SystemPtr sys, const Vec& y,
                                                                const Vec& c, long period,
                                                                SystemPtr next, const Vec& d_next) {
  FilterRecord rec = filter_update(pred, std::move(sys), y, c, period);
  std::optional<FilterState> out;
  if (next) out = filter_predict(rec, std::move(next), d_next);
  return {std::move(out), std::move(rec)};
}

SmoothStep smooth_step(const FilterRecord& rec, const Vec& r) {
  SmoothStep out;
  if (rec.has_next()) {
    out.a_smooth = rec.a_filt + rec.N_times(r);
    out.r_prev = rec.Lt_times(r) + rec.observation_score();
  } else {
    out.a_smooth = rec.a_filt;
    out.r_prev = rec.observation_score();
  }
  return out;
}

FilterPass filter_pass(const FilterState& prior, const std::vector<Period>& periods,
                       const Period* tail) {
  FilterPass out;
  if (periods.empty()) return out;
  out.records.reserve(periods.size());
  FilterState state = predict_from(prior, *periods.front().sys, periods.front().d);
  for (std::size_t i = 0; i < periods.size(); ++i) {
    const Period& per = periods[i];
    FilterRecord rec = filter_update(state, per.sys, per.y, per.c, per.row);
    if (i + 1 < periods.size()) {
      state = filter_predict(rec, periods[i + 1].sys, periods[i + 1].d);
    } else if (tail) {
      out.tail_pred = filter_predict(rec, tail->sys, tail->d);
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

SmoothPass smooth_pass(const std::vector<FilterRecord>& records, const Vec& r_last) {
  SmoothPass out;
  out.a_smooth.resize(records.size());
  Vec r = r_last;
  for (std::size_t i = records.size(); i-- > 0;) {
    SmoothStep st = smooth_step(records[i], r);
    out.a_smooth[i] = std::move(st.a_smooth);
    r = std::move(st.r_prev);
  }
  out.r_before_first = std::move(r);
  return out;
}

std::vector<Mat> smoothed_covariances(const std::vector<FilterRecord>& records) {
  std::vector<Mat> out(records.size());
  Mat nn;
  for (std::size_t i = records.size(); i-- > 0;) {
    const FilterRecord& rec = records[i];
    Mat score_info;
    if (rec.F.rows() > 0) {
      Eigen::LLT<Mat> llt(rec.F);
      score_info = rec.sys->Z.transpose() * llt.solve(rec.sys->Z);
    } else {
      score_info = Mat::Zero(rec.sys->state_dim(), rec.sys->state_dim());
    }
    if (rec.has_next() && nn.size() > 0) {
      const Mat n_mat = rec.N();
      const Mat l_mat = rec.L();
      out[i] = rec.P_filt - n_mat * nn * n_mat.transpose();
      nn = score_info + l_mat.transpose() * nn * l_mat;
    } else {
      out[i] = rec.P_filt;
      nn = score_info;
    }
    symmetrize(out[i]);
  }
  return out;
}

Vec unconditional_mean(const VarParams& params) {
  const Index n = params.n();
  Mat a = Mat::Identity(n, n);
  for (Index j = 1; j <= params.p(); ++j) a -= params.lag(j);
  return a.partialPivLu().solve(params.intercept());
}

Mat stationary_covariance(const VarParams& params, Index groups) {
  const Index n = params.n();
  const Index p = params.p();
  const Index np = n * p;
  if (np <= 200) {
    const double rho = params.spectral_radius();
    if (!(rho < 1.0))
      throw InitializationError("stationary initialisation needs spectral radius < 1 (got " +
                                std::to_string(rho) + "); use the diffuse-proxy mode");
  }
  // Doubling: G = sum_k A^k Omega A'^k.
  Mat a = params.companion(p);
  Mat g = Mat::Zero(np, np);
  g.topLeftCorner(n, n) = params.sigma(0);
  bool converged = false;
  for (int it = 0; it < 80; ++it) {
    const Mat inc = a * g * a.transpose();
    g += inc;
    const double scale = g.cwiseAbs().maxCoeff();
    if (!std::isfinite(scale)) break;
    if (inc.cwiseAbs().maxCoeff() <= 1e-17 * scale) {
      converged = true;
      break;
    }
    a = (a * a).eval();
  }
  if (!converged)
    throw InitializationError(
        "stationary initialisation did not converge (VAR not stable); use the diffuse-proxy mode");
  symmetrize(g);
  if (groups == p) return g;
  if (groups != p + 1) throw ConfigError("stationary_covariance: groups must be p or p+1");

  // Extend with x_{t-p}: Cov(z_t, x_{t-p}) = F Cov(z_{t-1}, x_{t-p}).
  Mat out = Mat::Zero(n * groups, n * groups);
  out.topLeftCorner(np, np) = g;
  const Mat cross = params.companion(p) * g.rightCols(n);
  out.topRightCorner(np, n) = cross;
  out.bottomLeftCorner(n, np) = cross.transpose();
  out.bottomRightCorner(n, n) = g.topLeftCorner(n, n);
  return out;
}

Mat stationary_quarterly_covariance(const VarParams& params, Index groups) {
  const Index n = params.n();
  const Index n_q = params.n_q();
  const Index p = params.p();
  if (n * p <= 200) {
    const double rho = params.spectral_radius();
    if (!(rho < 1.0))
      throw InitializationError("stationary initialisation needs spectral radius < 1 (got " +
                                std::to_string(rho) + "); use the diffuse-proxy mode");
  }
  if (n_q == 0) return Mat(0, 0);
  const Index h_max = groups - 1;
  // MA weights restricted to the quarterly rows: R_k = sum_j R_{k-j} Pi_j.
  std::vector<Mat> ring(static_cast<std::size_t>(std::max(p, h_max) + 1));
  const auto slot = [&](Index k) -> Mat& { return ring[static_cast<std::size_t>(k) % ring.size()]; };
  std::vector<Mat> gamma(static_cast<std::size_t>(h_max + 1), Mat::Zero(n_q, n_q));
  std::vector<Mat> loads(ring.size());
  const auto lslot = [&](Index k) -> Mat& { return loads[static_cast<std::size_t>(k) % loads.size()]; };
  const Mat& w = params.chol(0);
  const Index cap = 2000000;
  Index quiet = 0;
  double peak = 0.0;
  for (Index k = 0; k < cap; ++k) {
    Mat r = Mat::Zero(n_q, n);
    if (k == 0) {
      for (Index i = 0; i < n_q; ++i) r(i, params.n_m() + i) = 1.0;
    } else {
      for (Index j = 1; j <= std::min(k, p); ++j) r.noalias() += slot(k - j) * params.lag(j);
    }
    const Mat a = r * w;
    slot(k) = r;
    lslot(k) = a;
    for (Index h = 0; h <= std::min(k, h_max); ++h)
      gamma[static_cast<std::size_t>(h)].noalias() += a * lslot(k - h).transpose();
    const double size = r.cwiseAbs().maxCoeff();
    if (!std::isfinite(size)) break;
    peak = std::max(peak, size);
    quiet = size <= 1e-17 * peak ? quiet + 1 : 0;
    if (quiet > p) {
      Mat out(n_q * groups, n_q * groups);
      for (Index a_ = 0; a_ < groups; ++a_)
        for (Index b = a_; b < groups; ++b) {
          const Mat& g = gamma[static_cast<std::size_t>(b - a_)];
          out.block(a_ * n_q, b * n_q, n_q, n_q) = g;
          out.block(b * n_q, a_ * n_q, n_q, n_q) = g.transpose();
        }
      symmetrize(out);
      return out;
    }
  }
  throw InitializationError(
      "stationary initialisation did not converge (VAR not stable); use the diffuse-proxy mode");
}

FilterState init_state(const VarParams& params, Index dim, const InitOptions& opts) {
  const Index n = params.n();
  const Index groups = params.p() + 1;
  const bool compact = dim == params.n_q() * groups;
  if (!compact && dim != n * groups)
    throw ConfigError("init_state: dimension " + std::to_string(dim) +
                      " matches neither the compact nor the companion layout");
  if (opts.mode == InitMode::DiffuseProxy) {
    if (!(opts.kappa > 0.0)) throw ConfigError("init_state: kappa must be positive");
    return {Vec::Zero(dim), opts.kappa * Mat::Identity(dim, dim)};
  }
  const Vec mu = unconditional_mean(params);
  if (compact) {
    Vec mean(dim);
    for (Index k = 0; k < groups; ++k) mean.segment(k * params.n_q(), params.n_q()) = mu.tail(params.n_q());
    return {mean, stationary_quarterly_covariance(params, groups)};
  }
  Vec mean_full(n * groups);
  for (Index k = 0; k < groups; ++k) mean_full.segment(k * n, n) = mu;
  return {mean_full, stationary_covariance(params, groups)};
}

}  // namespace mfss
