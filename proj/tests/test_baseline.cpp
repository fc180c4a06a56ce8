#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mfss/adaptive.hpp"
#include "mfss/baseline.hpp"
#include "mfss/blocked.hpp"
#include "mfss/oracle.hpp"
#include "support.hpp"

using namespace mfss;
using namespace mfss::testing;

namespace {

double rel_err(const Mat& got, const Mat& want) {
  return (got - want).cwiseAbs().maxCoeff() / std::max(1.0, want.cwiseAbs().maxCoeff());
}

}  // namespace

TEST_CASE("balanced panel: every backend is the compact smoother") {
  std::mt19937_64 rng(51);
  VarParams params = random_var(4, 1, 3, 0.9, rng);
  const auto scheme = AggregationScheme::intra_quarterly_average();
  // T = 24 ends on a quarter end so the final row is balanced.
  const auto inst = simulate_instance(params, scheme, 24, {0, 0, 0, 0}, rng());
  const ModelContext ctx(std::move(params), scheme, inst.data);
  REQUIRE(ctx.tb() == ctx.T());
  const Mat& v = inst.data.values();
  RunStats s0, s1, s2, s3;
  const Mat ref = smooth_compact_only(ctx, v, &s0);
  const Mat base = smooth_baseline(ctx, v, &s1);
  const Mat blk = smooth_blocked(ctx, v, &s2);
  const Mat ada = smooth_adaptive(ctx, v, &s3);
  CHECK((base.array() == ref.array()).all());
  CHECK((blk.array() == ref.array()).all());
  CHECK((ada.array() == ref.array()).all());
  for (const RunStats* s : {&s1, &s2, &s3}) {
    CHECK(s->companion_steps == 0);
    CHECK(s->adaptive_steps == 0);
    CHECK(s->blocked_mults == 0);
    CHECK(s->compact_steps == ctx.T() - ctx.p());
  }
}

TEST_CASE("four-variable example against direct conditioning") {
  std::mt19937_64 rng(52);
  for (int rep = 0; rep < 5; ++rep) {
    VarParams params = random_var(3, 1, 3, 0.9, rng);
    const auto scheme = AggregationScheme::intra_quarterly_average();
    const auto inst = simulate_instance(params, scheme, 11, {0, 1, 2}, rng());
    const ModelContext ctx(params, scheme, inst.data);
    REQUIRE(ctx.tb() == 9);
    RunStats stats;
    const Mat got = smooth_baseline(ctx, inst.data.values(), &stats);
    const OracleResult ref = oracle_joint(params, ctx.agg(), inst.data);
    CHECK(rel_err(got, ref.mean) < 1e-8);
    CHECK(stats.companion_steps == 2);
    CHECK(stats.compact_steps == 6);
  }
}

TEST_CASE("two-lag model with a two-row edge: all backends") {
  std::mt19937_64 rng(53);
  for (int rep = 0; rep < 5; ++rep) {
    VarParams params = random_var(5, 1, 2, 0.9, rng);
    const auto scheme = AggregationScheme::custom({0.5, 0.5});
    const auto inst = simulate_instance(params, scheme, 24, {0, 1, 2, 2, 0}, rng());
    const ModelContext ctx(params, scheme, inst.data);
    REQUIRE(ctx.tb() == 22);
    const Mat& v = inst.data.values();
    const Mat base = smooth_baseline(ctx, v);
    CHECK(rel_err(smooth_blocked(ctx, v), base) < 1e-10);
    CHECK(rel_err(smooth_adaptive(ctx, v), base) < 1e-10);
    CHECK(rel_err(smooth_oracle(ctx, v), base) < 1e-8);
    CHECK(rel_err(oracle_joint(params, ctx.agg(), inst.data).mean, base) < 1e-8);
  }
}

TEST_CASE("lifting the compact state into the companion layout") {
  std::mt19937_64 rng(54);
  VarParams params = random_var(3, 2, 3, 0.9, rng);
  const auto scheme = AggregationScheme::intra_quarterly_average();
  const auto inst = simulate_instance(params, scheme, 20, {0, 1, 2}, rng());
  const ModelContext ctx(params, scheme, inst.data);
  const Index row = ctx.tb() - 1;
  const Index nq = 2, n = 5, groups = 4;
  const FilterState compact{random_matrix(nq * groups, 1, rng), random_spd(nq * groups, rng)};
  const FilterState lifted = lift_compact_state(ctx, compact, inst.data.values(), row);
  REQUIRE(lifted.a.size() == n * groups);
  IndexList qpos, mpos;
  for (Index g = 0; g < groups; ++g) {
    for (Index i = 0; i < 3; ++i) {
      mpos.push_back(g * n + i);
      CHECK(lifted.a(g * n + i) == inst.data.values()(row - g, i));
    }
    for (Index k = 0; k < nq; ++k) qpos.push_back(g * n + 3 + k);
  }
  CHECK(lifted.P(mpos, Eigen::all).isZero(0.0));
  CHECK(lifted.P(Eigen::all, mpos).isZero(0.0));
  CHECK(lifted.P(qpos, qpos) == compact.P);
  CHECK(lifted.a(qpos) == compact.a);

  // With zero coefficients the prediction is the intercept and the shock covariance.
  Vec c(5);
  c << 0.1, -0.2, 0.3, 0.4, -0.5;
  const VarParams zero(3, 2, 3, c, Mat::Zero(5, 15), {random_lower(5, rng)});
  const ModelContext zctx(zero, scheme, inst.data);
  const FilterState pred = compact_to_companion(zctx, compact, inst.data.values(), row);
  CHECK((pred.a.head(5) - c).isZero(1e-15));
  CHECK((pred.P.topLeftCorner(5, 5) - zero.sigma(row + 1)).isZero(1e-14));
  CHECK(pred.P.topRightCorner(5, 15).isZero(0.0));
}

TEST_CASE("companion smoothed state back to the compact recursion") {
  const Vec a = Vec::Constant(1, 0.0);
  CHECK(companion_to_compact(Vec::Constant(1, 1.0), a, Mat::Constant(1, 1, 2.0))(0) ==
        doctest::Approx(0.5));
  std::mt19937_64 rng(55);
  const Vec a3 = random_matrix(3, 1, rng);
  CHECK(companion_to_compact(a3, a3, random_spd(3, rng)).isZero(0.0));
  // A singular covariance is inverted on its support.
  Mat P = Mat::Zero(3, 3);
  P(0, 0) = 4.0;
  Vec diff = Vec::Zero(3);
  diff(0) = 2.0;
  const Vec r = companion_to_compact(a3 + diff, a3, P);
  CHECK(r(0) == doctest::Approx(0.5));
  CHECK(r.tail(2).isZero(0.0));
}
