#include "mfss/model.hpp"

#include <algorithm>
#include <cstring>
#include <string>

#include <Eigen/Eigenvalues>

#include "mfss/errors.hpp"

namespace mfss {

namespace {

std::string dims(Index r, Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

void fnv1a(std::uint64_t& h, const void* data, std::size_t len) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
}

}  // namespace

VarParams::VarParams(Index n_m, Index n_q, Index p, Vec intercept, Mat lag_coeffs,
                     std::vector<Mat> chol_cov, bool allow_degenerate_noise)
    : n_m_(n_m),
      n_q_(n_q),
      p_(p),
      intercept_(std::move(intercept)),
      lags_(std::move(lag_coeffs)),
      chol_(std::move(chol_cov)) {
  const Index n = n_m_ + n_q_;
  if (n_m_ < 0 || n_q_ < 0 || n == 0) throw ConfigError("VarParams: need n_m + n_q > 0");
  if (p_ < 1) throw ConfigError("VarParams: lag order p must be >= 1");
  if (intercept_.size() != n)
    throw ConfigError("VarParams: intercept has length " + std::to_string(intercept_.size()) +
                      ", expected " + std::to_string(n));
  if (lags_.rows() != n || lags_.cols() != n * p_)
    throw ConfigError("VarParams: lag coefficients are " + dims(lags_.rows(), lags_.cols()) +
                      ", expected " + dims(n, n * p_));
  if (chol_.empty()) throw ConfigError("VarParams: at least one covariance factor required");
  sigma_.reserve(chol_.size());
  for (std::size_t k = 0; k < chol_.size(); ++k) {
    const Mat& w = chol_[k];
    if (w.rows() != n || w.cols() != n)
      throw ConfigError("VarParams: covariance factor " + std::to_string(k) + " is " +
                        dims(w.rows(), w.cols()) + ", expected " + dims(n, n));
    for (Index j = 0; j < n; ++j) {
      for (Index i = 0; i < j; ++i) {
        if (w(i, j) != 0.0)
          throw ConfigError("VarParams: covariance factor " + std::to_string(k) +
                            " is not lower triangular");
      }
      const double diag = w(j, j);
      if (allow_degenerate_noise ? !(diag >= 0.0) : !(diag > 0.0))
        throw ConfigError("VarParams: covariance factor " + std::to_string(k) +
                          " has a non-positive diagonal entry");
    }
    sigma_.push_back(w * w.transpose());
  }
}

Mat VarParams::companion(Index groups) const {
  const Index n = this->n();
  if (groups < p_) throw ConfigError("companion: fewer lag groups than the lag order");
  Mat f = Mat::Zero(n * groups, n * groups);
  f.topLeftCorner(n, n * p_) = lags_;
  if (groups > 1) f.bottomLeftCorner(n * (groups - 1), n * (groups - 1)).setIdentity();
  return f;
}

double VarParams::spectral_radius() const {
  const Mat f = companion(p_);
  Eigen::EigenSolver<Mat> solver(f, false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

std::uint64_t VarParams::hash() const {
  std::uint64_t h = 14695981039346656037ULL;
  const Index header[3] = {n_m_, n_q_, p_};
  fnv1a(h, header, sizeof(header));
  fnv1a(h, intercept_.data(), sizeof(double) * intercept_.size());
  fnv1a(h, lags_.data(), sizeof(double) * lags_.size());
  for (const auto& w : chol_) fnv1a(h, w.data(), sizeof(double) * w.size());
  return h;
}

AggregationScheme AggregationScheme::intra_quarterly_average() { return {}; }

AggregationScheme AggregationScheme::custom(std::vector<double> weights) {
  return {AggregationKind::CustomWeights, std::move(weights)};
}

IndexList Aggregation::quarterly_positions(Index group_size, Index q_offset) const {
  IndexList out;
  out.reserve(static_cast<std::size_t>(p_q * n_q));
  for (Index l = 0; l < p_q; ++l)
    for (Index k = 0; k < n_q; ++k) out.push_back(l * group_size + q_offset + k);
  return out;
}

Aggregation build_aggregation(const AggregationScheme& scheme, Index n_m, Index n_q, Index p) {
  const Index p_q = scheme.p_q();
  if (p_q < 1) throw ConfigError("aggregation: p_q must be >= 1");
  if (scheme.kind == AggregationKind::IntraQuarterlyAverage) {
    if (p_q != 3 || std::any_of(scheme.weights.begin(), scheme.weights.end(),
                                [](double w) { return w != 1.0 / 3.0; }))
      throw ConfigError("aggregation: intra-quarterly average must have weights (1/3, 1/3, 1/3)");
  }
  if (p < p_q)
    throw ConfigError("aggregation: lag order p=" + std::to_string(p) +
                      " is smaller than the aggregation length p_q=" + std::to_string(p_q));

  const Index n = n_m + n_q;
  Aggregation agg;
  agg.n_m = n_m;
  agg.n_q = n_q;
  agg.p = p;
  agg.p_q = p_q;
  agg.lambda_qq = Mat::Zero(n_q, n_q * p_q);
  for (Index k = 0; k < n_q; ++k)
    for (Index l = 0; l < p_q; ++l)
      agg.lambda_qq(k, l * n_q + k) = scheme.weights[static_cast<std::size_t>(l)];

  agg.lambda = Mat::Zero(n, n * p);
  agg.lambda.topLeftCorner(n_m, n_m).setIdentity();
  const IndexList qpos = agg.quarterly_positions(n, n_m);
  for (Index k = 0; k < n_q; ++k)
    for (Index c = 0; c < n_q * p_q; ++c)
      agg.lambda(n_m + k, qpos[static_cast<std::size_t>(c)]) = agg.lambda_qq(k, c);
  agg.lambda_q = agg.lambda.bottomRows(n_q);
  return agg;
}

MixedFreqData::MixedFreqData(Mat values, Index n_m, Index n_q, int calendar_offset,
                             bool enforce_calendar)
    : values_(std::move(values)), n_m_(n_m), n_q_(n_q), calendar_offset_(calendar_offset) {
  if (values_.cols() != n_m_ + n_q_)
    throw ConfigError("data: " + std::to_string(values_.cols()) + " columns, expected " +
                      std::to_string(n_m_ + n_q_));
  if (calendar_offset_ < 0 || calendar_offset_ > 2)
    throw ConfigError("data: calendar offset must be 0, 1 or 2");
  if (!enforce_calendar) return;
  for (Index r = 0; r < values_.rows(); ++r) {
    if (quarter_end(r)) continue;
    for (Index k = 0; k < n_q_; ++k)
      if (observed(r, n_m_ + k))
        throw PatternError("data: quarterly series " + std::to_string(k) +
                           " has a value at row " + std::to_string(r) +
                           ", which is not a quarter-end month");
  }
}

MixedFreqData MixedFreqData::with_values(const Mat& values) const {
  MixedFreqData out = *this;
  for (Index j = 0; j < values_.cols(); ++j)
    for (Index i = 0; i < values_.rows(); ++i)
      if (observed(i, j)) out.values_(i, j) = values(i, j);
  return out;
}

ObservationPattern pattern_from_mask(const MixedFreqData& data, Index p) {
  ObservationPattern pat;
  pat.T = data.T();
  pat.p = p;
  const Index n_m = data.n_m();
  pat.unobserved.resize(static_cast<std::size_t>(pat.T));
  pat.observed.resize(static_cast<std::size_t>(pat.T));
  pat.quarterly_observed.resize(static_cast<std::size_t>(pat.T));

  pat.tb = pat.T;
  for (Index r = 0; r < pat.T; ++r) {
    auto& u = pat.unobserved[static_cast<std::size_t>(r)];
    auto& o = pat.observed[static_cast<std::size_t>(r)];
    for (Index i = 0; i < n_m; ++i) (data.observed(r, i) ? o : u).push_back(i);
    for (Index k = 0; k < data.n_q(); ++k)
      if (data.observed(r, n_m + k)) pat.quarterly_observed[static_cast<std::size_t>(r)].push_back(k);
    if (!u.empty() && pat.tb == pat.T) pat.tb = r;
  }
  return pat;
}

ObservationPattern detect_pattern(const MixedFreqData& data, Index p) {
  ObservationPattern pat = pattern_from_mask(data, p);
  if (pat.tb <= p)
    throw PatternError("pattern: only " + std::to_string(pat.tb) +
                       " fully observed leading rows; need at least p+1 = " +
                       std::to_string(p + 1));
  for (Index r = pat.tb + 1; r < pat.T; ++r) {
    const auto& prev = pat.unobserved[static_cast<std::size_t>(r - 1)];
    const auto& cur = pat.unobserved[static_cast<std::size_t>(r)];
    if (!std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()))
      throw PatternError("pattern: ragged edge is not monotone at row " + std::to_string(r) +
                         " (a monthly series missing at row " + std::to_string(r - 1) +
                         " is observed again)");
  }
  return pat;
}

CompanionSystem build_companion_system(const VarParams& params, const Aggregation& agg,
                                       const ObservationPattern& pattern, Index row) {
  const Index n = params.n();
  const Index n_m = params.n_m();
  const Index groups = params.p() + 1;
  const Index dim = n * groups;

  CompanionSystem sys;
  sys.F1 = params.companion(groups);
  sys.Fc = Vec::Zero(dim);
  sys.Fc.head(n) = params.intercept();
  sys.H = Mat::Zero(dim, n);
  sys.H.topRows(n) = params.chol(row);
  sys.Omega = Mat::Zero(dim, dim);
  sys.Omega.topLeftCorner(n, n) = params.sigma(row);

  const auto& obs_m = pattern.observed[static_cast<std::size_t>(row)];
  const auto& obs_q = pattern.quarterly_observed[static_cast<std::size_t>(row)];
  const IndexList qpos = agg.quarterly_positions(n, n_m);
  sys.Z = Mat::Zero(static_cast<Index>(obs_m.size() + obs_q.size()), dim);
  Index r = 0;
  for (Index i : obs_m) {
    sys.Z(r++, i) = 1.0;
    sys.obs_vars.push_back(i);
  }
  for (Index k : obs_q) {
    for (Index c = 0; c < static_cast<Index>(qpos.size()); ++c)
      sys.Z(r, qpos[static_cast<std::size_t>(c)]) = agg.lambda_qq(k, c);
    ++r;
    sys.obs_vars.push_back(n_m + k);
  }
  return sys;
}

}  // namespace mfss
