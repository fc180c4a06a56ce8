#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mfss/model.hpp"

namespace mfss {

/// Random VAR with companion spectral radius rescaled to `radius`
/// (Pi_j multiplied by s^j), a small intercept and a random lower-triangular
/// Cholesky factor.
VarParams random_var(Index n_m, Index n_q, Index p, double radius, std::mt19937_64& rng);

enum class MissingRecipe { Bracket, Proportional };

MissingRecipe parse_recipe(const std::string& name);
std::string recipe_name(MissingRecipe r);

/// Ragged-edge composition for n variables: counts of monthly series missing
/// at both final rows, fully observed, and missing at the final row only.
struct EdgeCounts {
  Index both = 0;
  Index full = 0;
  Index last_only = 0;
};

/// Bracket: 1 for n <= 40, 2 for n <= 80, 3 above; proportional: ceil(0.025 n).
/// Fully observed: ceil(0.3 n). The rest of the monthly series go missing at
/// the final row only.
EdgeCounts edge_counts(Index n, Index n_m, MissingRecipe recipe = MissingRecipe::Bracket);

/// Trailing missing-row count per monthly variable: fully observed series
/// first, then those missing at the last row, then those missing at both.
std::vector<Index> edge_lengths(const EdgeCounts& counts);

struct SyntheticInstance {
  Mat latent;
  MixedFreqData data;
};

/// Simulates T rows (after a burn-in) and masks them: monthly variable i is
/// missing on its last `trailing[i]` rows, quarterly variables are observed
/// at quarter ends only.
SyntheticInstance simulate_instance(const VarParams& params, const AggregationScheme& scheme,
                                    Index T, const std::vector<Index>& trailing,
                                    std::uint64_t seed, int calendar_offset = 0,
                                    Index burn_in = 200);

}  // namespace mfss
