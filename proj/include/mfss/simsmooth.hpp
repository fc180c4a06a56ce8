#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mfss/context.hpp"

namespace mfss {

enum class Backend { Baseline, Blocked, Adaptive, Oracle };

std::string backend_name(Backend b);
// Throws ConfigError for unknown names.
Backend parse_backend(const std::string& name);

/// Draw from the model with the intercept removed, initial quarterly lags
/// from the filter's prior (mean zero) and presample monthly values at zero.
/// `y_plus` is NaN wherever the data are missing and on presample quarterly
/// entries.
struct PseudoSample {
  Mat x_plus;
  Mat y_plus;
  std::uint64_t seed = 0;
};

struct LatentDraw {
  Mat X;
  std::uint64_t seed = 0;
  Backend backend = Backend::Adaptive;
  std::uint64_t param_hash = 0;
};

/// Per-draw seed from (master, index), independent of execution order.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

PseudoSample gen_pseudo(const ModelContext& ctx, std::uint64_t seed);

/// Smoothed means of `values` (same mask as the context) with the chosen backend.
Mat smooth_means(const ModelContext& ctx, const Mat& values, Backend backend,
                 RunStats* stats = nullptr);

/// x = x_plus + E(x | y - y_plus), with observed monthly entries copied from
/// the data.
LatentDraw draw_from_pseudo(const ModelContext& ctx, const PseudoSample& pseudo, Backend backend,
                            RunStats* stats = nullptr);

LatentDraw draw_latent(const ModelContext& ctx, Backend backend, std::uint64_t seed,
                       RunStats* stats = nullptr);

/// Worker count used by draw_many: `requested` when positive, otherwise the
/// hardware concurrency, capped by MF_SMOOTH_THREADS when set.
unsigned draw_threads(unsigned requested = 0);

/// `n_draws` draws, draw i seeded with derive_seed(master_seed, i). When
/// `elapsed_ms` is given it receives the wall time of each draw.
std::vector<LatentDraw> draw_many(const ModelContext& ctx, Backend backend, std::size_t n_draws,
                                  std::uint64_t master_seed, unsigned threads = 0,
                                  std::vector<double>* elapsed_ms = nullptr);

/// Largest violation of the draw invariants: observed monthly entries must be
/// reproduced exactly and quarterly aggregates must match observed values.
struct ConstraintCheck {
  double monthly = 0.0;
  double quarterly = 0.0;
};
ConstraintCheck check_constraints(const ModelContext& ctx, const Mat& X);

}  // namespace mfss
