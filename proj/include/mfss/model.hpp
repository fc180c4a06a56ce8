#pragma once

#include <cstdint>
#include <vector>

#include "mfss/linalg.hpp"

namespace mfss {

/// Parameters of the high-frequency VAR(p)
///
///   x_t = Pi_c + Pi_1 x_{t-1} + ... + Pi_p x_{t-p} + W_t e_t,  e_t ~ N(0, I_n)
///
/// Variables are ordered monthly first, quarterly last. The lag matrices are
/// stored side by side as one n x np block (Pi_1 | ... | Pi_p). `chol_cov`
/// holds either one constant lower-triangular factor or one per data row.
class VarParams {
 public:
  VarParams(Index n_m, Index n_q, Index p, Vec intercept, Mat lag_coeffs,
            std::vector<Mat> chol_cov, bool allow_degenerate_noise = false);

  Index n_m() const { return n_m_; }
  Index n_q() const { return n_q_; }
  Index n() const { return n_m_ + n_q_; }
  Index p() const { return p_; }

  const Vec& intercept() const { return intercept_; }
  const Mat& lags() const { return lags_; }
  // Pi_j for j = 1..p
  auto lag(Index j) const { return lags_.middleCols((j - 1) * n(), n()); }
  double coef(Index j, Index row, Index col) const {
    return lags_(row, (j - 1) * n() + col);
  }

  bool constant_cov() const { return chol_.size() == 1; }
  std::size_t cov_count() const { return chol_.size(); }
  std::size_t cov_index(Index row) const {
    return constant_cov() ? 0 : static_cast<std::size_t>(row);
  }
  const Mat& chol(Index row) const { return chol_[cov_index(row)]; }
  const Mat& sigma(Index row) const { return sigma_[cov_index(row)]; }
  const std::vector<Mat>& chol_factors() const { return chol_; }

  // Companion transition over `groups` lag groups (groups >= p); the rows
  // below the first block form the shift (I | 0).
  Mat companion(Index groups) const;
  double spectral_radius() const;

  std::uint64_t hash() const;

 private:
  Index n_m_;
  Index n_q_;
  Index p_;
  Vec intercept_;
  Mat lags_;
  std::vector<Mat> chol_;
  std::vector<Mat> sigma_;
};

enum class AggregationKind { IntraQuarterlyAverage, CustomWeights };

struct AggregationScheme {
  AggregationKind kind = AggregationKind::IntraQuarterlyAverage;
  std::vector<double> weights{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};

  static AggregationScheme intra_quarterly_average();
  static AggregationScheme custom(std::vector<double> weights);
  Index p_q() const { return static_cast<Index>(weights.size()); }
};

/// Aggregation matrices for a given (n_m, n_q, p).
///  lambda    : n x np, maps z_t = (x_t', ..., x_{t-p+1}')' to observables
///  lambda_q  : its quarterly rows (n_q x np)
///  lambda_qq : n_q x n_q p_q core, column l*n_q + k loads x_{q_k, t-l}
struct Aggregation {
  Index n_m = 0;
  Index n_q = 0;
  Index p = 0;
  Index p_q = 0;
  Mat lambda;
  Mat lambda_q;
  Mat lambda_qq;

  // Positions of the quarterly aggregation inputs in a stacked state whose
  // lag groups have `group_size` entries and quarterly variables start at
  // `q_offset` within each group. Ordered like lambda_qq's columns.
  IndexList quarterly_positions(Index group_size, Index q_offset) const;
};

Aggregation build_aggregation(const AggregationScheme& scheme, Index n_m, Index n_q, Index p);

/// Per-row observation structure of a ragged-edge panel. Rows are 0-based;
/// the first p rows are the presample that initialises the lags.
struct ObservationPattern {
  Index T = 0;
  Index p = 0;
  // T_b: number of leading rows with every monthly series observed.
  Index tb = 0;
  std::vector<IndexList> unobserved;          // U_t, monthly indices
  std::vector<IndexList> observed;            // O_t, monthly indices
  std::vector<IndexList> quarterly_observed;  // quarterly offsets 0..n_q-1

  bool balanced() const { return tb == T; }
  Index first_row() const { return p; }
};

/// T x n panel with NaN marking missing entries. Quarterly values may only
/// sit on quarter-end rows, i.e. rows r with (r + 1) % 3 == calendar_offset.
class MixedFreqData {
 public:
  MixedFreqData(Mat values, Index n_m, Index n_q, int calendar_offset = 0,
                bool enforce_calendar = true);

  const Mat& values() const { return values_; }
  Index T() const { return values_.rows(); }
  Index n_m() const { return n_m_; }
  Index n_q() const { return n_q_; }
  int calendar_offset() const { return calendar_offset_; }
  bool observed(Index row, Index col) const { return !std::isnan(values_(row, col)); }
  bool quarter_end(Index row) const { return (row + 1) % 3 == calendar_offset_; }

  // Same mask, new values (entries at missing positions are ignored).
  MixedFreqData with_values(const Mat& values) const;

 private:
  Mat values_;
  Index n_m_;
  Index n_q_;
  int calendar_offset_;
};

/// Validated pattern: at least p+1 balanced leading rows and a monotone edge.
ObservationPattern detect_pattern(const MixedFreqData& data, Index p);

/// Observed/unobserved sets of an arbitrary mask, without validation.
ObservationPattern pattern_from_mask(const MixedFreqData& data, Index p);

/// Companion-form state space with p+1 lag groups:
///   y_t = Z_t alpha_t,  alpha_t = F1 alpha_{t-1} + Fc + H_t e_t
struct CompanionSystem {
  Mat F1;
  Vec Fc;
  Mat Omega;
  Mat H;
  Mat Z;
  IndexList obs_vars;
};

CompanionSystem build_companion_system(const VarParams& params, const Aggregation& agg,
                                       const ObservationPattern& pattern, Index row);

}  // namespace mfss
