#include "mfss/synth.hpp"

#include <cmath>

#include "mfss/errors.hpp"

namespace mfss {

VarParams random_var(Index n_m, Index n_q, Index p, double radius, std::mt19937_64& rng) {
  const Index n = n_m + n_q;
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.5, 1.5);
  Mat lags(n, n * p);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n * p));
  for (Index j = 0; j < lags.cols(); ++j)
    for (Index i = 0; i < n; ++i) lags(i, j) = scale * normal(rng);
  Vec intercept(n);
  for (Index i = 0; i < n; ++i) intercept(i) = 0.1 * normal(rng);
  Mat w = Mat::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    w(j, j) = unif(rng);
    for (Index i = j + 1; i < n; ++i) w(i, j) = 0.2 * normal(rng);
  }

  VarParams draft(n_m, n_q, p, intercept, lags, {w});
  const double rho = draft.spectral_radius();
  if (rho > 0.0) {
    const double s = radius / rho;
    double f = 1.0;
    for (Index j = 0; j < p; ++j) {
      f *= s;
      lags.middleCols(j * n, n) *= f;
    }
  }
  return VarParams(n_m, n_q, p, std::move(intercept), std::move(lags), {std::move(w)});
}

MissingRecipe parse_recipe(const std::string& name) {
  if (name == "bracket") return MissingRecipe::Bracket;
  if (name == "proportional") return MissingRecipe::Proportional;
  throw ConfigError("unknown missingness recipe '" + name + "' (expected bracket or proportional)");
}

std::string recipe_name(MissingRecipe r) {
  return r == MissingRecipe::Bracket ? "bracket" : "proportional";
}

EdgeCounts edge_counts(Index n, Index n_m, MissingRecipe recipe) {
  EdgeCounts c;
  if (recipe == MissingRecipe::Bracket)
    c.both = n <= 40 ? 1 : (n <= 80 ? 2 : 3);
  else
    c.both = static_cast<Index>(std::ceil(0.025 * static_cast<double>(n) - 1e-12));
  c.full = static_cast<Index>(std::ceil(0.3 * static_cast<double>(n) - 1e-12));
  c.both = std::min(c.both, n_m);
  c.full = std::min(c.full, n_m - c.both);
  c.last_only = n_m - c.both - c.full;
  return c;
}

std::vector<Index> edge_lengths(const EdgeCounts& counts) {
  std::vector<Index> out;
  out.insert(out.end(), static_cast<std::size_t>(counts.full), 0);
  out.insert(out.end(), static_cast<std::size_t>(counts.last_only), 1);
  out.insert(out.end(), static_cast<std::size_t>(counts.both), 2);
  return out;
}

SyntheticInstance simulate_instance(const VarParams& params, const AggregationScheme& scheme,
                                    Index T, const std::vector<Index>& trailing,
                                    std::uint64_t seed, int calendar_offset, Index burn_in) {
  const Index n = params.n();
  const Index n_m = params.n_m();
  const Index n_q = params.n_q();
  const Index p = params.p();
  if (static_cast<Index>(trailing.size()) != n_m)
    throw ConfigError("simulate: need one trailing-missing count per monthly variable");
  if (!params.constant_cov() && static_cast<Index>(params.cov_count()) != T)
    throw ConfigError("simulate: time-varying covariance needs T factors");
  const Aggregation agg = build_aggregation(scheme, n_m, n_q, p);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const Index total = T + burn_in;
  Mat x = Mat::Zero(total, n);
  Vec e(n);
  for (Index t = 0; t < total; ++t) {
    for (Index i = 0; i < n; ++i) e(i) = normal(rng);
    const Index row = std::max<Index>(t - burn_in, 0);
    Vec xt = params.intercept() + params.chol(row) * e;
    for (Index j = 1; j <= p && t - j >= 0; ++j)
      xt.noalias() += params.lag(j) * x.row(t - j).transpose();
    x.row(t) = xt.transpose();
  }

  SyntheticInstance out{x.bottomRows(T), MixedFreqData(Mat::Constant(T, n, NAN), n_m, n_q, calendar_offset)};
  Mat values = Mat::Constant(T, n, NAN);
  for (Index i = 0; i < n_m; ++i)
    for (Index t = 0; t < T - trailing[static_cast<std::size_t>(i)]; ++t) values(t, i) = out.latent(t, i);
  for (Index t = agg.p_q - 1; t < T; ++t) {
    if ((t + 1) % 3 != calendar_offset) continue;
    for (Index k = 0; k < n_q; ++k) {
      double s = 0.0;
      for (Index l = 0; l < agg.p_q; ++l)
        for (Index k2 = 0; k2 < n_q; ++k2) s += agg.lambda_qq(k, l * n_q + k2) * out.latent(t - l, n_m + k2);
      values(t, n_m + k) = s;
    }
  }
  out.data = MixedFreqData(std::move(values), n_m, n_q, calendar_offset);
  return out;
}

}  // namespace mfss
