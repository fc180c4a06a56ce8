#pragma once

#include <memory>

#include "mfss/model.hpp"

namespace mfss {

/// One period of a linear Gaussian state space with a shared disturbance:
///
///   y_t     = Z_t alpha_t + c_t + G_t e_t,        c_t = C_t w_t + c0_t
///   alpha_t = T_t alpha_{t-1} + d_t + H_t e_t,    d_t = D_t w_t + d0_t
///
/// where w_t stacks exogenous lagged monthly data (one block per variable,
/// lags 1..p inside each block). R = GG', Q = HH' and S = HG' are filled by
/// subsetting Sigma_t rather than by multiplication.
struct StateSpaceSystem {
  Mat Z;
  Mat C;
  Mat G;
  Vec c0;
  Mat T;
  Mat D;
  Mat H;
  Vec d0;
  Mat R;
  Mat Q;
  Mat S;
  // Data column behind each observation row.
  IndexList obs_vars;
  // Monthly variables entering w_t, in block order.
  IndexList exog_vars;

  Index state_dim() const { return T.rows(); }
  Index prev_dim() const { return T.cols(); }
  Index obs_dim() const { return Z.rows(); }
};

using SystemPtr = std::shared_ptr<const StateSpaceSystem>;

/// Index sets for the adaptive formulation at one period.
///
/// `aug` are the monthly variables carried in the state at t (U_t in the
/// standard scheme) and `aug_prev` those at t-1. Monthly variables outside
/// `aug_prev` enter as exogenous lagged data. Observed monthly variables that
/// are also in `aug` are measured without noise by a selection row; this only
/// happens when the state is augmented beyond the unobserved set.
struct AdaptiveIndex {
  Index n_m = 0;
  Index n_q = 0;
  IndexList aug;
  IndexList aug_prev;
  IndexList observed;
  IndexList exog_prev;
  IndexList quarterly_observed;

  Index head() const { return static_cast<Index>(aug.size()) + n_q; }
  Index head_prev() const { return static_cast<Index>(aug_prev.size()) + n_q; }

  // (|aug| + n_q) x (|aug_prev| + n_q) selection with J' head_t = head_{t-1}.
  Mat J() const;
  // Columns of the identity removed from J: variables entering the state at t.
  Mat J_perp() const;
  IndexList entering() const;

  static AdaptiveIndex make(Index n_m, Index n_q, IndexList aug, IndexList aug_prev,
                            IndexList observed, IndexList quarterly_observed);
};

/// Standard adaptive index at `row`: aug = U_t, aug_prev = U_{t-1}.
AdaptiveIndex adaptive_index(const ObservationPattern& pattern, Index n_q, Index row);

Mat build_adaptive_T(const VarParams& params, const AdaptiveIndex& idx);
Mat build_adaptive_D(const VarParams& params, const AdaptiveIndex& idx);
Mat build_adaptive_Z(const VarParams& params, const Aggregation& agg, const AdaptiveIndex& idx);
Mat build_adaptive_C(const VarParams& params, const AdaptiveIndex& idx);
Mat build_adaptive_G(const VarParams& params, const AdaptiveIndex& idx, Index row);
Mat build_adaptive_H(const VarParams& params, const AdaptiveIndex& idx, Index row);

StateSpaceSystem build_adaptive_system(const VarParams& params, const Aggregation& agg,
                                       const AdaptiveIndex& idx, Index row);

/// Z_t expressed on the period-t state restricted to the variables that were
/// already in the state at t-1, i.e. Z_t (I_{p+1} kron J_t).
Mat condense_to_previous_layout(const Mat& z, const AdaptiveIndex& idx, Index groups);

/// Compact form at a balanced row (row < T_b): state holds the quarterly
/// variables with p+1 lag groups, monthly data enter as exogenous lags.
StateSpaceSystem build_compact_system(const VarParams& params, const Aggregation& agg,
                                      const ObservationPattern& pattern, Index row);

/// Compact transition equation into `row` (observation block empty). Valid
/// whenever the p monthly lags before `row` are observed.
StateSpaceSystem build_compact_transition(const VarParams& params, const Aggregation& agg,
                                          Index row);

/// Dense state-space view of the companion form (no exogenous data, G = 0).
StateSpaceSystem companion_state_space(const CompanionSystem& comp);

/// w_t for `sys` at `row`: for each exogenous variable, values at rows
/// row-1, ..., row-p.
Vec exogenous_vector(const Mat& values, const IndexList& exog_vars, Index row, Index p);

}  // namespace mfss
