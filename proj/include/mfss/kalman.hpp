#pragma once

#include <optional>
#include <vector>

#include "mfss/state_space.hpp"

namespace mfss {

struct FilterState {
  Vec a;
  Mat P;
};

/// Everything the backward pass needs from one filtering period.
///
/// The gain K_t and the matrices L_{t+1} = T_{t+1} - K_t Z_t and
/// N_{t+1} = P_t L_{t+1}' - H_t G_t' K_t' refer to the transition out of this
/// period; they are absent for the final period.
struct FilterRecord {
  long period = 0;
  SystemPtr sys;
  SystemPtr next;
  Vec v;
  Vec finv_v;
  Mat M;
  Mat F;
  Vec a_pred;
  Mat P_pred;
  Vec a_filt;
  Mat P_filt;
  Mat K;

  bool has_next() const { return next != nullptr; }
  Mat L() const;
  Mat N() const;
  Vec Lt_times(const Vec& r) const;
  Vec N_times(const Vec& r) const;
  // Z_t' F_t^{-1} v_t
  Vec observation_score() const;
};

/// Measurement update for one period. `c` is the full observation constant
/// c_t. Throws SingularInnovationError when F_t is not numerically positive
/// definite or its condition estimate exceeds `max_condition`.
FilterRecord filter_update(const FilterState& pred, SystemPtr sys, const Vec& y, const Vec& c,
                           long period, double max_condition = 1e12);

/// Gain and one-step prediction into the next period's system.
FilterState filter_predict(FilterRecord& rec, SystemPtr next, const Vec& d_next);

/// Prediction from a distribution over the state at t-1 (no update at t-1).
FilterState predict_from(const FilterState& prior, const StateSpaceSystem& next, const Vec& d_next);

/// filter_update followed by filter_predict when `next` is given.
std::pair<std::optional<FilterState>, FilterRecord> filter_step(const FilterState& pred,
                                                                SystemPtr sys, const Vec& y,
                                                                const Vec& c, long period,
                                                                SystemPtr next = nullptr,
                                                                const Vec& d_next = Vec());

struct SmoothStep {
  Vec a_smooth;
  Vec r_prev;
};

/// a_{t|T} = a_{t|t} + N_{t+1} r_t,  r_{t-1} = L_{t+1}' r_t + Z_t' F_t^{-1} v_t.
SmoothStep smooth_step(const FilterRecord& rec, const Vec& r);

/// One observation period as seen by the generic pass.
struct Period {
  long row = 0;
  SystemPtr sys;
  Vec y;
  Vec c;
  Vec d;
};

struct FilterPass {
  std::vector<FilterRecord> records;
  // Prediction into `tail` when one was supplied.
  std::optional<FilterState> tail_pred;
};

/// Runs predict/update over `periods` starting from a distribution over the
/// state before the first period. When `tail` is set, the final period also
/// predicts into it.
FilterPass filter_pass(const FilterState& prior, const std::vector<Period>& periods,
                       const Period* tail = nullptr);

struct SmoothPass {
  std::vector<Vec> a_smooth;
  Vec r_before_first;
};

SmoothPass smooth_pass(const std::vector<FilterRecord>& records, const Vec& r_last);

/// Smoothed state covariances via N_{t-1} = Z'F^{-1}Z + L'N_t L with zero
/// terminal condition.
std::vector<Mat> smoothed_covariances(const std::vector<FilterRecord>& records);

enum class InitMode { Stationary, DiffuseProxy };

struct InitOptions {
  InitMode mode = InitMode::Stationary;
  double kappa = 1e4;
};

/// Initial moments for a stacked state of p+1 lag groups. `dim` selects the
/// compact layout (n_q (p+1), quarterly variables only) or the companion
/// layout (n (p+1)). Stationary mode solves P = F1 P F1' + Omega and uses
/// the unconditional mean; diffuse-proxy returns (0, kappa I).
FilterState init_state(const VarParams& params, Index dim, const InitOptions& opts = {});

/// Stationary covariance of the companion state with `groups` lag groups.
Mat stationary_covariance(const VarParams& params, Index groups);
/// Same quantity restricted to the quarterly variables, from the MA weights of
/// the quarterly rows only. Cheap for large n.
Mat stationary_quarterly_covariance(const VarParams& params, Index groups);
Vec unconditional_mean(const VarParams& params);

}  // namespace mfss
