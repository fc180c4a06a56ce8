#pragma once

#include "mfss/context.hpp"

namespace mfss {

/// Companion layout with p+1 lag groups of n variables each.
struct BlockedLayout {
  Index n_m = 0;
  Index n_q = 0;
  Index n = 0;
  Index p = 0;
  // State positions loaded by the columns of lambda_qq.
  IndexList qlags;

  Index groups() const { return p + 1; }
  Index dim() const { return n * (p + 1); }
  static BlockedLayout make(const Aggregation& agg);
};

/// Observed series at one row: monthly selection rows first, then the
/// observed quarterly rows of lambda_qq.
struct BlockedObs {
  IndexList monthly;
  IndexList quarterly;
  Mat lambda_sel;

  Index size() const { return static_cast<Index>(monthly.size() + quarterly.size()); }
  static BlockedObs make(const Aggregation& agg, const ObservationPattern& pattern, Index row);
};

/// F_t = Z_t P_t Z_t' from the blocks P^{mm}, [P^{mq} lambda_qq'] and
/// lambda_qq P^{qq} lambda_qq'. The bracket is returned over all state rows
/// (dim x |quarterly|) since it also forms the quarterly columns of M_t.
Mat blocked_F(const Mat& P, const BlockedLayout& lay, const BlockedObs& obs, Mat* bracket);

/// M_t = (P^{., m}  [P^{., q} lambda_qq']).
Mat blocked_M(const Mat& P, const BlockedObs& obs, const Mat& bracket);

/// Dense K_t = (Pi B; B) where B holds rows 1:p of M_t F_t^{-1}. Used by the
/// dense-equivalence checks; the filter keeps only B.
Mat blocked_K(const Mat& B, const Mat& pi, const BlockedLayout& lay);

/// L_t = T - (K^m  [K^q lambda_q]); only the lambda_q columns that carry
/// weights are multiplied. `mults` receives the multiplications spent.
Mat blocked_L(const Mat& K, const Mat& pi, const BlockedLayout& lay, const BlockedObs& obs,
              long long* mults = nullptr);

/// a_{t+1} = (Pi a^{1:p} + c; a^{1:p}) and
/// P_{t+1} = ([Pi P^{1:p,1:p}] Pi' + Sigma, [.]; [.]', P^{1:p,1:p}).
/// `intercept` may be empty. `mults` receives the multiplications spent.
FilterState blocked_predict(const Vec& a_filt, const Mat& P_filt, const Mat& pi,
                            const Mat& sigma, const Vec& intercept = Vec(),
                            long long* mults = nullptr);

/// L_{t+1}' r from the gain block B without forming L.
Vec blocked_Lt_times(const Mat& B, const Mat& pi, const Vec& r, const BlockedLayout& lay,
                     const BlockedObs& obs);

/// Z_t' x for the companion observation rows.
Vec blocked_Zt_times(const Vec& x, const BlockedLayout& lay, const BlockedObs& obs);

/// r_{t-1} = L_{t+1}' r_t + ([F^{-1}v]_m; lambda_q' [F^{-1}v]_q; 0).
Vec blocked_smooth_r(const Mat& B, const Mat& pi, const Vec& r, const Vec& finv_v,
                     const BlockedLayout& lay, const BlockedObs& obs);

/// Baseline procedure with the edge rows run through the blocked recursions.
Mat smooth_blocked(const ModelContext& ctx, const Mat& values, RunStats* stats = nullptr);

}  // namespace mfss
