#include "mfss/simsmooth.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

#include "mfss/adaptive.hpp"
#include "mfss/baseline.hpp"
#include "mfss/blocked.hpp"
#include "mfss/errors.hpp"
#include "mfss/oracle.hpp"

namespace mfss {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Mat prior_root(const Mat& p) {
  Eigen::LLT<Mat> llt(p);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  return psd_sqrt(p);
}

}  // namespace

std::string backend_name(Backend b) {
  switch (b) {
    case Backend::Baseline:
      return "baseline";
    case Backend::Blocked:
      return "blocked";
    case Backend::Adaptive:
      return "adaptive";
    case Backend::Oracle:
      return "oracle";
  }
  return "unknown";
}

Backend parse_backend(const std::string& name) {
  if (name == "baseline") return Backend::Baseline;
  if (name == "blocked") return Backend::Blocked;
  if (name == "adaptive") return Backend::Adaptive;
  if (name == "oracle") return Backend::Oracle;
  throw ConfigError("unknown backend '" + name +
                    "' (expected baseline, blocked, adaptive or oracle)");
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ (index * 0xD1B54A32D192ED03ULL + 1));
}

PseudoSample gen_pseudo(const ModelContext& ctx, std::uint64_t seed) {
  const VarParams& params = ctx.params();
  const Index T = ctx.T();
  const Index n = ctx.n();
  const Index n_m = params.n_m();
  const Index n_q = params.n_q();
  const Index p = ctx.p();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  PseudoSample out;
  out.seed = seed;
  out.x_plus = Mat::Zero(T, n);

  const Mat root = prior_root(ctx.prior().P);
  Vec z(root.cols());
  for (Index i = 0; i < z.size(); ++i) z(i) = normal(rng);
  const Vec init = root * z;
  for (Index k = 0; k < p; ++k)
    for (Index q = 0; q < n_q; ++q) out.x_plus(p - 1 - k, n_m + q) = init(k * n_q + q);

  Vec e(n);
  Vec x(n);
  for (Index t = p; t < T; ++t) {
    for (Index i = 0; i < n; ++i) e(i) = normal(rng);
    x.noalias() = params.chol(t) * e;
    for (Index j = 1; j <= p; ++j) x.noalias() += params.lag(j) * out.x_plus.row(t - j).transpose();
    out.x_plus.row(t) = x.transpose();
  }

  const MixedFreqData& data = ctx.data();
  const Aggregation& agg = ctx.agg();
  out.y_plus = Mat::Constant(T, n, NAN);
  for (Index t = 0; t < T; ++t) {
    for (Index i = 0; i < n_m; ++i)
      if (data.observed(t, i)) out.y_plus(t, i) = out.x_plus(t, i);
    if (t < p) continue;
    for (Index k = 0; k < n_q; ++k) {
      if (!data.observed(t, n_m + k)) continue;
      double s = 0.0;
      for (Index l = 0; l < agg.p_q; ++l)
        for (Index k2 = 0; k2 < n_q; ++k2) s += agg.lambda_qq(k, l * n_q + k2) * out.x_plus(t - l, n_m + k2);
      out.y_plus(t, n_m + k) = s;
    }
  }
  return out;
}

Mat smooth_means(const ModelContext& ctx, const Mat& values, Backend backend, RunStats* stats) {
  switch (backend) {
    case Backend::Baseline:
      return smooth_baseline(ctx, values, stats);
    case Backend::Blocked:
      return smooth_blocked(ctx, values, stats);
    case Backend::Adaptive:
      return smooth_adaptive(ctx, values, stats);
    case Backend::Oracle:
      return smooth_oracle(ctx, values);
  }
  throw ConfigError("unknown backend");
}

LatentDraw draw_from_pseudo(const ModelContext& ctx, const PseudoSample& pseudo, Backend backend,
                            RunStats* stats) {
  const Mat& y = ctx.data().values();
  const Mat y_star = y - pseudo.y_plus;
  LatentDraw out;
  out.X = pseudo.x_plus + smooth_means(ctx, y_star, backend, stats);
  for (Index t = 0; t < ctx.T(); ++t)
    for (Index i = 0; i < ctx.params().n_m(); ++i)
      if (ctx.data().observed(t, i)) out.X(t, i) = y(t, i);
  out.seed = pseudo.seed;
  out.backend = backend;
  out.param_hash = ctx.params().hash();
  return out;
}

LatentDraw draw_latent(const ModelContext& ctx, Backend backend, std::uint64_t seed,
                       RunStats* stats) {
  return draw_from_pseudo(ctx, gen_pseudo(ctx, seed), backend, stats);
}

unsigned draw_threads(unsigned requested) {
  unsigned n = requested > 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MF_SMOOTH_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) n = std::min(n, static_cast<unsigned>(cap));
  }
  return n;
}

std::vector<LatentDraw> draw_many(const ModelContext& ctx, Backend backend, std::size_t n_draws,
                                  std::uint64_t master_seed, unsigned threads,
                                  std::vector<double>* elapsed_ms) {
  std::vector<LatentDraw> out(n_draws);
  if (elapsed_ms) elapsed_ms->assign(n_draws, 0.0);
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(draw_threads(threads), std::max<std::size_t>(n_draws, 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto work = [&] {
    for (std::size_t i = next++; i < n_draws; i = next++) {
      try {
        const auto t0 = std::chrono::steady_clock::now();
        out[i] = draw_latent(ctx, backend, derive_seed(master_seed, i));
        if (elapsed_ms)
          (*elapsed_ms)[i] =
              std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = n_draws;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

ConstraintCheck check_constraints(const ModelContext& ctx, const Mat& X) {
  ConstraintCheck out;
  const MixedFreqData& data = ctx.data();
  const Aggregation& agg = ctx.agg();
  const Index n_m = data.n_m();
  const Index n_q = data.n_q();
  for (Index t = 0; t < ctx.T(); ++t) {
    for (Index i = 0; i < n_m; ++i)
      if (data.observed(t, i)) {
        const double d = std::abs(X(t, i) - data.values()(t, i));
        out.monthly = std::isnan(d) ? INFINITY : std::max(out.monthly, d);
      }
    if (t < ctx.p()) continue;
    for (Index k = 0; k < n_q; ++k) {
      if (!data.observed(t, n_m + k)) continue;
      double s = 0.0;
      for (Index l = 0; l < agg.p_q; ++l)
        for (Index k2 = 0; k2 < n_q; ++k2) s += agg.lambda_qq(k, l * n_q + k2) * X(t - l, n_m + k2);
      const double y = data.values()(t, n_m + k);
      const double d = std::abs(s - y) / std::max(1.0, std::abs(y));
      out.quarterly = std::isnan(d) ? INFINITY : std::max(out.quarterly, d);
    }
  }
  return out;
}

}  // namespace mfss
