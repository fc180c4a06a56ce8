// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 when any fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "mfss/adaptive.hpp"
#include "mfss/bench.hpp"
#include "mfss/errors.hpp"
#include "mfss/oracle.hpp"
#include "mfss/simsmooth.hpp"
#include "example_matrices.hpp"
#include "support.hpp"

using namespace mfss;
using namespace mfss::testing;

namespace {

// Tolerances and sizes.
constexpr double kIdentityTol = 1e-8;
constexpr double kOracleTol = 1e-8;
constexpr double kQuarterlyTol = 1e-8;
constexpr int kGridInstances = 60;
constexpr int kDrawsPerInstance = 2;
constexpr Index kJointCap = 200;
constexpr double kRatioP6 = 2.0;
constexpr double kRatioP12 = 5.0;
constexpr int kMcDraws = 2000;
constexpr double kMcSe = 3.0;
constexpr double kMcVarTol = 0.10;

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Elementwise relative difference, absolute for entries below one in magnitude.
double rel_err(const Mat& got, const Mat& want) {
  return ((got - want).array().abs() / want.array().abs().max(1.0)).maxCoeff();
}

struct GridInstance {
  std::shared_ptr<ModelContext> ctx;
  std::string label;
};

// Random instances over n in 4..20, n_q in {1, 3}, p in {2, 4, 6}, T in 24..60
// with monotone edges of length 1 to 3.
std::vector<GridInstance> make_grid(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Index ps[] = {2, 4, 6};
  const Index nqs[] = {1, 3};
  std::vector<GridInstance> out;
  while (static_cast<int>(out.size()) < count) {
    const Index n = 4 + static_cast<Index>(rng() % 17);
    const Index n_q = nqs[rng() % 2];
    const Index p = ps[rng() % 3];
    const Index T = 24 + static_cast<Index>(rng() % 37);
    const Index edge = 1 + static_cast<Index>(rng() % 3);
    const Index n_m = n - n_q;
    VarParams params = random_var(n_m, n_q, p, 0.9, rng);
    const AggregationScheme scheme = scheme_for(p);
    const auto inst = simulate_instance(params, scheme, T, random_edge(n_m, edge, rng), rng());
    try {
      auto ctx = std::make_shared<ModelContext>(std::move(params), scheme, inst.data);
      out.push_back({ctx, fmt::format("n={} n_q={} p={} T={} edge={}", n, n_q, p, T, edge)});
    } catch (const PatternError&) {
      // The quarterly calendar can leave too few balanced rows; draw again.
    }
  }
  return out;
}

Outcome cross_backend(const std::vector<GridInstance>& grid, std::vector<std::pair<const ModelContext*, Mat>>& draws) {
  double worst = 0.0;
  std::string where;
  std::uint64_t seed = 1;
  for (const auto& g : grid) {
    for (int d = 0; d < kDrawsPerInstance; ++d, ++seed) {
      const LatentDraw ref = draw_latent(*g.ctx, Backend::Baseline, seed);
      draws.emplace_back(g.ctx.get(), ref.X);
      for (Backend b : {Backend::Blocked, Backend::Adaptive}) {
        const LatentDraw x = draw_latent(*g.ctx, b, seed);
        draws.emplace_back(g.ctx.get(), x.X);
        const double e = rel_err(x.X, ref.X);
        if (e > worst) {
          worst = e;
          where = g.label + " " + backend_name(b);
        }
      }
    }
  }
  return {worst <= kIdentityTol,
          fmt::format("{} instances x {} draws, max rel diff {:.2e} (tol {:.0e}){}", grid.size(),
                      kDrawsPerInstance, worst, kIdentityTol, where.empty() ? "" : " at " + where)};
}

Outcome oracle_equivalence(const std::vector<GridInstance>& grid) {
  // Grid instances small enough for direct conditioning, plus a dedicated small set.
  std::vector<GridInstance> small;
  for (const auto& g : grid)
    if (g.ctx->T() * g.ctx->n() <= kJointCap) small.push_back(g);
  std::mt19937_64 rng(202);
  while (small.size() < 25) {
    const Index n_q = 1 + static_cast<Index>(rng() % 2) * 2;
    const Index n = std::max<Index>(4, n_q + 1 + static_cast<Index>(rng() % 4));
    const Index p = 2 + static_cast<Index>(rng() % 3);
    const Index T = std::min<Index>(kJointCap / n, 24 + static_cast<Index>(rng() % 20));
    const Index n_m = n - n_q;
    VarParams params = random_var(n_m, n_q, p, 0.9, rng);
    const auto scheme = scheme_for(p);
    const auto inst = simulate_instance(params, scheme, T, random_edge(n_m, 1 + static_cast<Index>(rng() % 3), rng), rng());
    try {
      small.push_back({std::make_shared<ModelContext>(std::move(params), scheme, inst.data),
                       fmt::format("n={} n_q={} p={} T={}", n, n_q, p, T)});
    } catch (const PatternError&) {
    }
  }
  double worst = 0.0;
  std::string where;
  for (const auto& g : small) {
    const ModelContext& ctx = *g.ctx;
    const Mat want = oracle_joint(ctx.params(), ctx.agg(), ctx.data(), ctx.init(), kJointCap).mean;
    for (Backend b : {Backend::Baseline, Backend::Blocked, Backend::Adaptive, Backend::Oracle}) {
      const double e = rel_err(smooth_means(ctx, ctx.data().values(), b), want);
      if (e > worst) {
        worst = e;
        where = g.label + " " + backend_name(b);
      }
    }
  }
  return {worst <= kOracleTol, fmt::format("{} instances with T*n <= {}, max rel diff {:.2e} (tol {:.0e}){}",
                                           small.size(), kJointCap, worst, kOracleTol,
                                           where.empty() ? "" : " at " + where)};
}

Outcome constraints(const std::vector<std::pair<const ModelContext*, Mat>>& draws) {
  std::size_t ok = 0;
  double worst_m = 0.0, worst_q = 0.0;
  for (const auto& [ctx, X] : draws) {
    const ConstraintCheck c = check_constraints(*ctx, X);
    worst_m = std::max(worst_m, c.monthly);
    worst_q = std::max(worst_q, c.quarterly);
    if (c.monthly == 0.0 && c.quarterly <= kQuarterlyTol) ++ok;
  }
  return {ok == draws.size() && !draws.empty(),
          fmt::format("{}/{} draws, max monthly deviation {:.1e}, max quarterly {:.2e} (tol {:.0e})", ok,
                      draws.size(), worst_m, worst_q, kQuarterlyTol)};
}

Outcome mult_counts() {
  const auto a = mult_count(20, 80);
  const auto b = mult_count(14, 8);
  return {a == 4096000000ULL && b == 1404928ULL,
          fmt::format("mult_count(20,80) = {}, mult_count(14,8) = {}", a, b)};
}

Outcome example_matrices() {
  std::mt19937_64 rng(505);
  double worst = 0.0;
  const int reps = 20;
  for (int rep = 0; rep < reps; ++rep) {
    const VarParams params(3, 1, 3, Vec::Zero(4), random_matrix(4, 12, rng), {random_lower(4, rng)});
    worst = std::max(worst, example_mismatch(example_built(params, 8), example_balanced(params)));
    worst = std::max(worst, example_mismatch(example_built(params, 7), [&] {
                       ExampleMatrices m = example_balanced(params);
                       m.Z = m.Z.topRows(3).eval();
                       m.C = m.C.topRows(3).eval();
                       m.G = m.G.topRows(3).eval();
                       return m;
                     }()));
    worst = std::max(worst, example_mismatch(example_built(params, 9), example_first_edge(params)));
    worst = std::max(worst, example_mismatch(example_built(params, 10), example_second_edge(params)));
  }
  return {worst == 0.0, fmt::format("{} random (Pi, W), three regimes, max abs diff {}", reps, worst)};
}

Outcome performance() {
  BenchConfig cfg;
  cfg.n = {120};
  cfg.n_q = {1};
  cfg.p = {6};
  cfg.T = 500;
  cfg.reps = 9;
  cfg.warmup = 3;
  cfg.seed = 606;
  cfg.backends = {Backend::Baseline, Backend::Blocked, Backend::Adaptive};
  const auto p6 = run_bench(cfg);
  cfg.p = {12};
  cfg.reps = 5;
  cfg.warmup = 1;
  cfg.backends = {Backend::Baseline, Backend::Adaptive};
  const auto p12 = run_bench(cfg);
  auto ms = [](const std::vector<BenchCell>& cells, Backend b) {
    for (const auto& c : cells)
      if (c.backend == b) return c.ms_per_iter;
    return 0.0;
  };
  const double base6 = ms(p6, Backend::Baseline), blk6 = ms(p6, Backend::Blocked), ada6 = ms(p6, Backend::Adaptive);
  const double base12 = ms(p12, Backend::Baseline), ada12 = ms(p12, Backend::Adaptive);
  const double r6 = base6 / ada6, r12 = base12 / ada12;
  const bool pass = ada6 < blk6 && blk6 < base6 && r6 >= kRatioP6 && r12 >= kRatioP12;
  return {pass, fmt::format("p=6: baseline {:.1f} ms, blocked {:.1f} ms, adaptive {:.1f} ms, ratio {:.2f} (>= {}); "
                            "p=12: baseline {:.1f} ms, adaptive {:.1f} ms, ratio {:.2f} (>= {})",
                            base6, blk6, ada6, r6, kRatioP6, base12, ada12, r12, kRatioP12)};
}

Outcome balanced_reduction() {
  std::mt19937_64 rng(707);
  bool pass = true;
  int cases = 0;
  for (Index p : {2, 4, 6}) {
    VarParams params = random_var(6, 1 + (p == 4 ? 2 : 0), p, 0.9, rng);
    const Index n_m = params.n_m();
    const auto scheme = scheme_for(p);
    const auto inst = simulate_instance(params, scheme, 36, std::vector<Index>(static_cast<std::size_t>(n_m), 0), rng());
    const ModelContext ctx(std::move(params), scheme, inst.data);
    if (ctx.tb() != ctx.T()) return {false, "instance is not balanced"};
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      RunStats s[3];
      const Backend bs[] = {Backend::Baseline, Backend::Blocked, Backend::Adaptive};
      Mat X[3];
      for (int k = 0; k < 3; ++k) X[k] = draw_latent(ctx, bs[k], seed, &s[k]).X;
      for (int k = 0; k < 3; ++k) {
        pass = pass && s[k].companion_steps == 0 && s[k].adaptive_steps == 0 && s[k].blocked_mults == 0;
        pass = pass && (X[k].array() == X[0].array()).all();
      }
      ++cases;
    }
  }
  return {pass, fmt::format("{} draws with T_b = T: bitwise-equal draws, zero companion/adaptive steps", cases)};
}

Outcome monte_carlo() {
  std::mt19937_64 rng(808);
  VarParams params = random_var(3, 1, 3, 0.9, rng);
  const auto scheme = AggregationScheme::intra_quarterly_average();
  const auto inst = simulate_instance(params, scheme, 12, {0, 1, 2}, rng());
  const ModelContext ctx(params, scheme, inst.data);
  const OracleResult ref = oracle_smooth(params, ctx.agg(), inst.data);
  const auto draws = draw_many(ctx, Backend::Adaptive, kMcDraws, 909);
  const Index T = ctx.T(), n = ctx.n();
  Mat sum = Mat::Zero(T, n), sumsq = Mat::Zero(T, n);
  for (const auto& d : draws) {
    sum += d.X;
    sumsq += d.X.cwiseProduct(d.X);
  }
  const double N = kMcDraws;
  const Mat mean = sum / N;
  const Mat var = (sumsq - sum.cwiseProduct(sum) / N) / (N - 1);
  int entries = 0, mean_ok = 0, var_ok = 0;
  double worst_z = 0.0, worst_v = 0.0;
  for (Index r = 0; r < T; ++r) {
    for (Index c = 0; c < n; ++c) {
      const double v = ref.cov[static_cast<std::size_t>(r)](c, c);
      if (v < 1e-10) continue;  // observed entries are checked by the constraint criterion
      ++entries;
      const double z = std::abs(mean(r, c) - ref.mean(r, c)) / std::sqrt(var(r, c) / N);
      const double dv = std::abs(var(r, c) / v - 1.0);
      worst_z = std::max(worst_z, z);
      worst_v = std::max(worst_v, dv);
      mean_ok += z <= kMcSe;
      var_ok += dv <= kMcVarTol;
    }
  }
  return {entries > 0 && mean_ok == entries && var_ok == entries,
          fmt::format("{} draws, {} latent entries: mean within {} SE {}/{} (max {:.2f}), variance within {:.0f}% "
                      "{}/{} (max {:.1f}%)",
                      kMcDraws, entries, kMcSe, mean_ok, entries, worst_z, 100 * kMcVarTol, var_ok, entries,
                      100 * worst_v)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::vector<int> only;
  app.add_option("--only", only, "criteria to run (default: all)")->check(CLI::Range(1, 8));
  CLI11_PARSE(app, argc, argv);
  auto wanted = [&](int k) { return only.empty() || std::find(only.begin(), only.end(), k) != only.end(); };

  std::vector<GridInstance> grid;
  std::vector<std::pair<const ModelContext*, Mat>> draws;
  if (wanted(1) || wanted(2) || wanted(3)) grid = make_grid(kGridInstances, 101);

  const std::pair<int, std::string> names[] = {
      {1, "cross-backend identity"}, {2, "oracle equivalence"},   {3, "aggregation and observation constraints"},
      {4, "multiplication counts"},  {5, "example system matrices"}, {6, "performance ordering"},
      {7, "balanced-edge reduction"}, {8, "Monte Carlo distribution"}};
  const std::function<Outcome()> checks[] = {
      [&] { return cross_backend(grid, draws); },
      [&] { return oracle_equivalence(grid); },
      [&] {
        if (draws.empty()) cross_backend(grid, draws);
        return constraints(draws);
      },
      mult_counts,
      example_matrices,
      performance,
      balanced_reduction,
      monte_carlo};

  int failed = 0;
  for (int k = 0; k < 8; ++k) {
    if (!wanted(k + 1)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = checks[k]();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("%s [%d] %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", names[k].first, names[k].second.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
