#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "mfss/kalman.hpp"
#include "mfss/synth.hpp"

namespace mfss::testing {

// Average over the quarter when the lag order allows it, a shorter window
// otherwise (p = 2 takes two equal weights, p = 1 skip-samples).
inline AggregationScheme scheme_for(Index p) {
  if (p >= 3) return AggregationScheme::intra_quarterly_average();
  if (p == 2) return AggregationScheme::custom({0.5, 0.5});
  return AggregationScheme::custom({1.0});
}

inline Mat random_matrix(Index r, Index c, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal;
  Mat m(r, c);
  for (Index j = 0; j < c; ++j)
    for (Index i = 0; i < r; ++i) m(i, j) = scale * normal(rng);
  return m;
}

inline Mat random_spd(Index n, std::mt19937_64& rng) {
  const Mat a = random_matrix(n, n, rng);
  return a * a.transpose() + 0.5 * Mat::Identity(n, n);
}

inline Mat random_lower(Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.5, 1.5);
  Mat w = random_matrix(n, n, rng, 0.3).triangularView<Eigen::Lower>();
  for (Index i = 0; i < n; ++i) w(i, i) = unif(rng);
  return w;
}

// Trailing-missing counts forming a monotone edge of length `edge`.
inline std::vector<Index> random_edge(Index n_m, Index edge, std::mt19937_64& rng) {
  std::vector<Index> out(static_cast<std::size_t>(n_m));
  for (auto& v : out) v = static_cast<Index>(rng() % static_cast<std::uint64_t>(edge + 1));
  out[rng() % static_cast<std::uint64_t>(n_m)] = edge;
  return out;
}

inline Mat with_nans(Mat m, const std::vector<std::pair<Index, Index>>& cells) {
  for (auto [r, c] : cells) m(r, c) = NAN;
  return m;
}

// T x (n_m + n_q) panel, monthly fully observed, quarterly at quarter ends.
inline Mat calendar_panel(Index T, Index n_m, Index n_q, std::mt19937_64& rng) {
  Mat v = random_matrix(T, n_m + n_q, rng);
  for (Index r = 0; r < T; ++r)
    if ((r + 1) % 3 != 0) v.rightCols(n_q).row(r).setConstant(NAN);
  return v;
}

struct TextbookStep {
  Vec a_filt;
  Mat P_filt;
  Vec a_next;
  Mat P_next;
};

// Uncorrelated-noise Kalman filter written out with explicit inverses:
//   y = Z a + c + eps (var R),  a' = T a + d + eta (var Q).
inline TextbookStep textbook_step(const Vec& a, const Mat& P, const Mat& Z, const Mat& R,
                                  const Vec& c, const Vec& y, const Mat& T, const Mat& Q,
                                  const Vec& d) {
  const Mat F = Z * P * Z.transpose() + R;
  const Mat Kf = P * Z.transpose() * F.inverse();
  TextbookStep s;
  s.a_filt = a + Kf * (y - Z * a - c);
  s.P_filt = P - Kf * Z * P;
  s.a_next = T * s.a_filt + d;
  s.P_next = T * s.P_filt * T.transpose() + Q;
  return s;
}

// Conditional mean of every state alpha_1..alpha_N given all observations,
// from the explicit joint Gaussian of the stacked states and observations.
// alpha_1 = T_1 a0 + d_1 + H_1 e_1 with a0 ~ N(a0, P0); later periods as in
// StateSpaceSystem with the shared disturbance e_t.
inline std::vector<Vec> joint_gaussian_means(const FilterState& prior,
                                             const std::vector<SystemPtr>& sys,
                                             const std::vector<Vec>& ys,
                                             const std::vector<Vec>& cs,
                                             const std::vector<Vec>& ds) {
  const auto N = sys.size();
  std::vector<Index> off(N + 1, 0);
  for (std::size_t t = 0; t < N; ++t) off[t + 1] = off[t] + sys[t]->state_dim();
  std::vector<Index> yoff(N + 1, 0);
  for (std::size_t t = 0; t < N; ++t) yoff[t + 1] = yoff[t] + sys[t]->obs_dim();
  const Index ne = sys[0]->H.cols();
  const Index n0 = prior.a.size();
  const Index shocks = n0 + ne * static_cast<Index>(N);

  // alpha = mu + A xi with xi = (z0, e_1, ..., e_N) standard normal.
  Mat A = Mat::Zero(off[N], shocks);
  Vec mu = Vec::Zero(off[N]);
  const Mat root = psd_sqrt(prior.P);
  Mat prevA(n0, shocks);
  prevA.setZero();
  prevA.leftCols(n0) = root;
  Vec prevMu = prior.a;
  for (std::size_t t = 0; t < N; ++t) {
    const auto& s = *sys[t];
    Mat at = s.T * prevA;
    at.middleCols(n0 + ne * static_cast<Index>(t), ne) += s.H;
    Vec mt = s.T * prevMu + ds[t];
    A.middleRows(off[t], s.state_dim()) = at;
    mu.segment(off[t], s.state_dim()) = mt;
    prevA = at;
    prevMu = mt;
  }
  Mat B = Mat::Zero(yoff[N], shocks);
  Vec my = Vec::Zero(yoff[N]);
  Vec yv(yoff[N]);
  for (std::size_t t = 0; t < N; ++t) {
    const auto& s = *sys[t];
    if (s.obs_dim() == 0) continue;
    Mat bt = s.Z * A.middleRows(off[t], s.state_dim());
    bt.middleCols(n0 + ne * static_cast<Index>(t), ne) += s.G;
    B.middleRows(yoff[t], s.obs_dim()) = bt;
    my.segment(yoff[t], s.obs_dim()) = s.Z * mu.segment(off[t], s.state_dim()) + cs[t];
    yv.segment(yoff[t], s.obs_dim()) = ys[t];
  }
  Mat syy = B * B.transpose();
  // Measurement noise not carried by the shared disturbance.
  for (std::size_t t = 0; t < N; ++t) {
    const auto& s = *sys[t];
    if (s.obs_dim() == 0) continue;
    syy.block(yoff[t], yoff[t], s.obs_dim(), s.obs_dim()) += s.R - s.G * s.G.transpose();
  }
  const Mat sxy = A * B.transpose();
  const Vec cond = mu + sxy * syy.ldlt().solve(yv - my);
  std::vector<Vec> out(N);
  for (std::size_t t = 0; t < N; ++t) out[t] = cond.segment(off[t], sys[t]->state_dim());
  return out;
}

// Random state-space period of the given sizes with shared disturbance.
inline StateSpaceSystem random_system(Index dim, Index prev_dim, Index obs, Index shocks,
                                      std::mt19937_64& rng, bool correlated = true) {
  StateSpaceSystem s;
  s.T = random_matrix(dim, prev_dim, rng, 0.5 / std::sqrt(static_cast<double>(prev_dim)));
  s.H = random_matrix(dim, shocks, rng, 0.7);
  s.Z = random_matrix(obs, dim, rng);
  s.G = correlated ? random_matrix(obs, shocks, rng, 0.5) : Mat::Zero(obs, shocks);
  s.c0 = Vec::Zero(obs);
  s.d0 = Vec::Zero(dim);
  s.R = s.G * s.G.transpose();
  s.Q = s.H * s.H.transpose();
  s.S = s.H * s.G.transpose();
  if (!correlated) {
    // Measurement noise independent of the state disturbance.
    s.R = Mat::Identity(obs, obs) * 0.5;
  }
  return s;
}

}  // namespace mfss::testing
