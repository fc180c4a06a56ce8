#include "mfss/state_space.hpp"

#include <algorithm>
#include <string>

#include "mfss/errors.hpp"

namespace mfss {

namespace {

bool contains(const IndexList& set, Index v) {
  return std::binary_search(set.begin(), set.end(), v);
}

Index position(const IndexList& set, Index v) {
  return static_cast<Index>(std::lower_bound(set.begin(), set.end(), v) - set.begin());
}

bool sorted_unique(const IndexList& v) {
  return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
}

// Variable (data column) at position h of the state head (aug then quarterly).
Index head_var(const IndexList& aug, Index n_m, Index h) {
  const auto na = static_cast<Index>(aug.size());
  return h < na ? aug[static_cast<std::size_t>(h)] : n_m + (h - na);
}

// Observation rows in order: observed monthly variables, then observed
// quarterly variables. `regression` marks monthly rows measured through the
// VAR equation (variable not carried in the state).
struct ObsLayout {
  IndexList vars;
  std::vector<bool> regression;
};

ObsLayout obs_layout(const AdaptiveIndex& idx) {
  ObsLayout out;
  for (Index i : idx.observed) {
    out.vars.push_back(i);
    out.regression.push_back(!contains(idx.aug, i));
  }
  for (Index k : idx.quarterly_observed) {
    out.vars.push_back(idx.n_m + k);
    out.regression.push_back(false);
  }
  return out;
}

void check_params(const VarParams& params, const AdaptiveIndex& idx) {
  if (params.n_m() != idx.n_m || params.n_q() != idx.n_q)
    throw FormulationError("adaptive index dimensions do not match the VAR");
}

}  // namespace

AdaptiveIndex AdaptiveIndex::make(Index n_m, Index n_q, IndexList aug, IndexList aug_prev,
                                  IndexList observed, IndexList quarterly_observed) {
  AdaptiveIndex idx;
  idx.n_m = n_m;
  idx.n_q = n_q;
  for (const IndexList* set : {&aug, &aug_prev, &observed}) {
    if (!sorted_unique(*set) || (!set->empty() && (set->front() < 0 || set->back() >= n_m)))
      throw FormulationError("adaptive index: monthly index sets must be sorted, unique and in range");
  }
  if (!sorted_unique(quarterly_observed) ||
      (!quarterly_observed.empty() &&
       (quarterly_observed.front() < 0 || quarterly_observed.back() >= n_q)))
    throw FormulationError("adaptive index: quarterly index set out of range");
  if (!std::includes(aug.begin(), aug.end(), aug_prev.begin(), aug_prev.end()))
    throw FormulationError(
        "adaptive index: state at t-1 carries a variable the state at t drops (non-monotone edge)");
  for (Index i = 0; i < n_m; ++i) {
    if (!contains(aug, i) && !contains(observed, i))
      throw FormulationError("adaptive index: monthly variable " + std::to_string(i) +
                             " is neither observed nor carried in the state");
    if (!contains(aug_prev, i)) idx.exog_prev.push_back(i);
  }
  idx.aug = std::move(aug);
  idx.aug_prev = std::move(aug_prev);
  idx.observed = std::move(observed);
  idx.quarterly_observed = std::move(quarterly_observed);
  return idx;
}

IndexList AdaptiveIndex::entering() const {
  IndexList out;
  std::set_difference(aug.begin(), aug.end(), aug_prev.begin(), aug_prev.end(),
                      std::back_inserter(out));
  return out;
}

Mat AdaptiveIndex::J() const {
  Mat j = Mat::Zero(head(), head_prev());
  for (Index c = 0; c < static_cast<Index>(aug_prev.size()); ++c)
    j(position(aug, aug_prev[static_cast<std::size_t>(c)]), c) = 1.0;
  for (Index k = 0; k < n_q; ++k)
    j(static_cast<Index>(aug.size()) + k, static_cast<Index>(aug_prev.size()) + k) = 1.0;
  return j;
}

Mat AdaptiveIndex::J_perp() const {
  const IndexList in = entering();
  Mat j = Mat::Zero(head(), static_cast<Index>(in.size()));
  for (Index e = 0; e < static_cast<Index>(in.size()); ++e)
    j(position(aug, in[static_cast<std::size_t>(e)]), e) = 1.0;
  return j;
}

AdaptiveIndex adaptive_index(const ObservationPattern& pattern, Index n_q, Index row) {
  const auto r = static_cast<std::size_t>(row);
  IndexList prev = row > 0 ? pattern.unobserved[r - 1] : IndexList{};
  const Index n_m =
      static_cast<Index>(pattern.observed[r].size() + pattern.unobserved[r].size());
  return AdaptiveIndex::make(n_m, n_q, pattern.unobserved[r], std::move(prev),
                             pattern.observed[r], pattern.quarterly_observed[r]);
}

Mat build_adaptive_T(const VarParams& params, const AdaptiveIndex& idx) {
  check_params(params, idx);
  const Index p = params.p();
  const Index g = idx.head();
  const Index gp = idx.head_prev();
  const Index n_m = idx.n_m;
  Mat t = Mat::Zero((p + 1) * g, (p + 1) * gp);
  for (Index h = 0; h < g; ++h) {
    const Index a = head_var(idx.aug, n_m, h);
    for (Index j = 1; j <= p; ++j)
      for (Index c = 0; c < gp; ++c)
        t(h, (j - 1) * gp + c) = params.coef(j, a, head_var(idx.aug_prev, n_m, c));
  }
  // I_p kron J_t, written entry by entry.
  for (Index c = 0; c < gp; ++c) {
    const Index v = head_var(idx.aug_prev, n_m, c);
    const Index h = v < n_m ? position(idx.aug, v) : static_cast<Index>(idx.aug.size()) + (v - n_m);
    for (Index k = 1; k <= p; ++k) t(k * g + h, (k - 1) * gp + c) = 1.0;
  }
  return t;
}

Mat build_adaptive_D(const VarParams& params, const AdaptiveIndex& idx) {
  check_params(params, idx);
  const Index p = params.p();
  const Index g = idx.head();
  const auto ne = static_cast<Index>(idx.exog_prev.size());
  Mat d = Mat::Zero((p + 1) * g, p * ne);
  for (Index h = 0; h < g; ++h) {
    const Index a = head_var(idx.aug, idx.n_m, h);
    for (Index e = 0; e < ne; ++e)
      for (Index j = 1; j <= p; ++j)
        d(h, e * p + j - 1) = params.coef(j, a, idx.exog_prev[static_cast<std::size_t>(e)]);
  }
  // I_p kron J_perp: lags of variables entering the state come from the data.
  for (Index v : idx.entering()) {
    const Index h = position(idx.aug, v);
    const Index e = position(idx.exog_prev, v);
    for (Index k = 1; k <= p; ++k) d(k * g + h, e * p + k - 1) = 1.0;
  }
  return d;
}

Mat build_adaptive_Z(const VarParams& params, const Aggregation& agg, const AdaptiveIndex& idx) {
  check_params(params, idx);
  const Index p = params.p();
  const Index g = idx.head();
  const Index na = static_cast<Index>(idx.aug.size());
  const ObsLayout rows = obs_layout(idx);
  Mat z = Mat::Zero(static_cast<Index>(rows.vars.size()), (p + 1) * g);
  for (Index r = 0; r < z.rows(); ++r) {
    const Index v = rows.vars[static_cast<std::size_t>(r)];
    if (v >= idx.n_m) {
      const Index k = v - idx.n_m;
      for (Index l = 0; l < agg.p_q; ++l)
        for (Index k2 = 0; k2 < idx.n_q; ++k2)
          z(r, l * g + na + k2) = agg.lambda_qq(k, l * idx.n_q + k2);
    } else if (!rows.regression[static_cast<std::size_t>(r)]) {
      z(r, position(idx.aug, v)) = 1.0;
    } else {
      for (Index j = 1; j <= p; ++j)
        for (Index c = 0; c < idx.head_prev(); ++c) {
          const Index b = head_var(idx.aug_prev, idx.n_m, c);
          const Index h = b < idx.n_m ? position(idx.aug, b) : na + (b - idx.n_m);
          z(r, j * g + h) = params.coef(j, v, b);
        }
    }
  }
  return z;
}

Mat build_adaptive_C(const VarParams& params, const AdaptiveIndex& idx) {
  check_params(params, idx);
  const Index p = params.p();
  const auto ne = static_cast<Index>(idx.exog_prev.size());
  const ObsLayout rows = obs_layout(idx);
  Mat c = Mat::Zero(static_cast<Index>(rows.vars.size()), p * ne);
  for (Index r = 0; r < c.rows(); ++r) {
    if (!rows.regression[static_cast<std::size_t>(r)]) continue;
    const Index v = rows.vars[static_cast<std::size_t>(r)];
    for (Index e = 0; e < ne; ++e)
      for (Index j = 1; j <= p; ++j)
        c(r, e * p + j - 1) = params.coef(j, v, idx.exog_prev[static_cast<std::size_t>(e)]);
  }
  return c;
}

Mat build_adaptive_G(const VarParams& params, const AdaptiveIndex& idx, Index row) {
  check_params(params, idx);
  const ObsLayout rows = obs_layout(idx);
  const Mat& w = params.chol(row);
  Mat gmat = Mat::Zero(static_cast<Index>(rows.vars.size()), params.n());
  for (Index r = 0; r < gmat.rows(); ++r)
    if (rows.regression[static_cast<std::size_t>(r)])
      gmat.row(r) = w.row(rows.vars[static_cast<std::size_t>(r)]);
  return gmat;
}

Mat build_adaptive_H(const VarParams& params, const AdaptiveIndex& idx, Index row) {
  check_params(params, idx);
  const Index g = idx.head();
  const Mat& w = params.chol(row);
  Mat h = Mat::Zero((params.p() + 1) * g, params.n());
  for (Index k = 0; k < g; ++k) h.row(k) = w.row(head_var(idx.aug, idx.n_m, k));
  return h;
}

StateSpaceSystem build_adaptive_system(const VarParams& params, const Aggregation& agg,
                                       const AdaptiveIndex& idx, Index row) {
  StateSpaceSystem sys;
  sys.T = build_adaptive_T(params, idx);
  sys.D = build_adaptive_D(params, idx);
  sys.Z = build_adaptive_Z(params, agg, idx);
  sys.C = build_adaptive_C(params, idx);
  sys.G = build_adaptive_G(params, idx, row);
  sys.H = build_adaptive_H(params, idx, row);
  sys.exog_vars = idx.exog_prev;

  const ObsLayout rows = obs_layout(idx);
  sys.obs_vars = rows.vars;
  const Index g = idx.head();
  const Index dim = sys.T.rows();
  const auto m = static_cast<Index>(rows.vars.size());
  const Mat& sigma = params.sigma(row);
  const Vec& pic = params.intercept();

  sys.c0 = Vec::Zero(m);
  sys.R = Mat::Zero(m, m);
  sys.S = Mat::Zero(dim, m);
  for (Index r = 0; r < m; ++r) {
    if (!rows.regression[static_cast<std::size_t>(r)]) continue;
    const Index v = rows.vars[static_cast<std::size_t>(r)];
    sys.c0(r) = pic(v);
    for (Index r2 = 0; r2 < m; ++r2)
      if (rows.regression[static_cast<std::size_t>(r2)])
        sys.R(r, r2) = sigma(v, rows.vars[static_cast<std::size_t>(r2)]);
    for (Index h = 0; h < g; ++h) sys.S(h, r) = sigma(head_var(idx.aug, idx.n_m, h), v);
  }
  sys.d0 = Vec::Zero(dim);
  sys.Q = Mat::Zero(dim, dim);
  for (Index h = 0; h < g; ++h) {
    const Index a = head_var(idx.aug, idx.n_m, h);
    sys.d0(h) = pic(a);
    for (Index h2 = 0; h2 < g; ++h2) sys.Q(h, h2) = sigma(a, head_var(idx.aug, idx.n_m, h2));
  }
  return sys;
}

Mat condense_to_previous_layout(const Mat& z, const AdaptiveIndex& idx, Index groups) {
  const Mat j = idx.J();
  const Index g = idx.head();
  const Index gp = idx.head_prev();
  Mat out(z.rows(), groups * gp);
  for (Index k = 0; k < groups; ++k) out.middleCols(k * gp, gp) = z.middleCols(k * g, g) * j;
  return out;
}

StateSpaceSystem build_compact_system(const VarParams& params, const Aggregation& agg,
                                      const ObservationPattern& pattern, Index row) {
  if (row >= pattern.tb)
    throw FormulationError("compact form requested at row " + std::to_string(row) +
                           " beyond the balanced part (T_b = " + std::to_string(pattern.tb) + ")");
  IndexList all = iota_list(0, params.n_m());
  const auto idx = AdaptiveIndex::make(params.n_m(), params.n_q(), {}, {}, all,
                                       pattern.quarterly_observed[static_cast<std::size_t>(row)]);
  return build_adaptive_system(params, agg, idx, row);
}

StateSpaceSystem build_compact_transition(const VarParams& params, const Aggregation& agg,
                                          Index row) {
  const auto idx =
      AdaptiveIndex::make(params.n_m(), params.n_q(), {}, {}, iota_list(0, params.n_m()), {});
  StateSpaceSystem sys = build_adaptive_system(params, agg, idx, row);
  const Index dim = sys.T.rows();
  sys.Z = Mat(0, dim);
  sys.C = Mat(0, sys.D.cols());
  sys.G = Mat(0, params.n());
  sys.c0 = Vec(0);
  sys.R = Mat(0, 0);
  sys.S = Mat(dim, 0);
  sys.obs_vars.clear();
  return sys;
}

StateSpaceSystem companion_state_space(const CompanionSystem& comp) {
  StateSpaceSystem sys;
  const Index dim = comp.F1.rows();
  const Index m = comp.Z.rows();
  sys.Z = comp.Z;
  sys.C = Mat(m, 0);
  sys.G = Mat::Zero(m, comp.H.cols());
  sys.c0 = Vec::Zero(m);
  sys.T = comp.F1;
  sys.D = Mat(dim, 0);
  sys.H = comp.H;
  sys.d0 = comp.Fc;
  sys.R = Mat::Zero(m, m);
  sys.Q = comp.Omega;
  sys.S = Mat::Zero(dim, m);
  sys.obs_vars = comp.obs_vars;
  return sys;
}

Vec exogenous_vector(const Mat& values, const IndexList& exog_vars, Index row, Index p) {
  Vec w(static_cast<Index>(exog_vars.size()) * p);
  for (Index e = 0; e < static_cast<Index>(exog_vars.size()); ++e)
    for (Index j = 1; j <= p; ++j)
      w(e * p + j - 1) = values(row - j, exog_vars[static_cast<std::size_t>(e)]);
  return w;
}

}  // namespace mfss
