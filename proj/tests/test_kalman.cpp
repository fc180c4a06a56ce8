#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mfss/errors.hpp"
#include "support.hpp"

using namespace mfss;
using namespace mfss::testing;

namespace {

SystemPtr scalar_system(double z, double t, double h, double g) {
  StateSpaceSystem s;
  s.Z = Mat::Constant(1, 1, z);
  s.T = Mat::Constant(1, 1, t);
  s.H = Mat::Constant(1, 1, h);
  s.G = Mat::Constant(1, 1, g);
  s.c0 = Vec::Zero(1);
  s.d0 = Vec::Zero(1);
  s.R = s.G * s.G.transpose();
  s.Q = s.H * s.H.transpose();
  s.S = s.H * s.G.transpose();
  return std::make_shared<const StateSpaceSystem>(s);
}

}  // namespace

TEST_CASE("filter step: scalar system with correlated noise") {
  const SystemPtr sys = scalar_system(1.0, 1.0, 1.0, 1.0);
  const FilterState pred{Vec::Zero(1), Mat::Ones(1, 1)};
  auto [next, rec] = filter_step(pred, sys, Vec::Constant(1, 2.0), Vec::Zero(1), 0, sys, Vec::Zero(1));
  CHECK(rec.M(0, 0) == 2.0);
  CHECK(rec.F(0, 0) == 4.0);
  CHECK(rec.K(0, 0) == 0.5);
  CHECK(rec.a_filt(0) == 1.0);
  CHECK(rec.P_filt(0, 0) == 0.0);
  REQUIRE(next.has_value());
  CHECK(next->a(0) == 1.0);
  CHECK(next->P(0, 0) == 1.0);

  // Continued with r = 0 at the final period the smoothed mean is a_{t|t}.
  FilterRecord last = filter_update(pred, sys, Vec::Constant(1, 2.0), Vec::Zero(1), 0);
  const SmoothStep st = smooth_step(last, Vec::Zero(1));
  CHECK(st.a_smooth(0) == 1.0);
}

TEST_CASE("filter step: uncorrelated noise reduces to the textbook filter") {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 10; ++rep) {
    const Index dim = 2 + static_cast<Index>(rng() % 4);
    const Index obs = 1 + static_cast<Index>(rng() % 3);
    auto s = random_system(dim, dim, obs, dim, rng, false);
    s.c0 = random_matrix(obs, 1, rng);
    s.d0 = random_matrix(dim, 1, rng);
    const SystemPtr sys = std::make_shared<const StateSpaceSystem>(s);
    FilterState state{random_matrix(dim, 1, rng), random_spd(dim, rng)};
    for (int t = 0; t < 5; ++t) {
      const Vec y = random_matrix(obs, 1, rng);
      const TextbookStep ref = textbook_step(state.a, state.P, s.Z, s.R, s.c0, y, s.T, s.Q, s.d0);
      auto [next, rec] = filter_step(state, sys, y, s.c0, t, sys, s.d0);
      CHECK((rec.a_filt - ref.a_filt).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((rec.P_filt - ref.P_filt).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((next->a - ref.a_next).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((next->P - ref.P_next).cwiseAbs().maxCoeff() < 1e-10);
      // Symmetry is exact after every step.
      CHECK((next->P - next->P.transpose()).cwiseAbs().maxCoeff() == 0.0);
      state = *next;
    }
  }
}

TEST_CASE("filter step: empty observation is a pure prediction") {
  std::mt19937_64 rng(22);
  auto s = random_system(3, 3, 0, 3, rng);
  const SystemPtr sys = std::make_shared<const StateSpaceSystem>(s);
  const FilterState pred{random_matrix(3, 1, rng), random_spd(3, rng)};
  auto [next, rec] = filter_step(pred, sys, Vec(0), Vec(0), 0, sys, Vec::Zero(3));
  CHECK(rec.v.size() == 0);
  CHECK(rec.F.size() == 0);
  CHECK(rec.a_filt == pred.a);
  CHECK(rec.P_filt == pred.P);
  CHECK((next->a - s.T * pred.a).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("filter step: singular innovation names the period") {
  const SystemPtr sys = scalar_system(0.0, 1.0, 1.0, 0.0);
  const FilterState pred{Vec::Zero(1), Mat::Ones(1, 1)};
  try {
    filter_update(pred, sys, Vec::Constant(1, 1.0), Vec::Zero(1), 17);
    FAIL("expected SingularInnovationError");
  } catch (const SingularInnovationError& e) {
    CHECK(e.period() == 17);
    CHECK(std::string(e.what()).find("t=17") != std::string::npos);
  }
}

TEST_CASE("smoother: joint Gaussian conditioning on random systems") {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 10; ++rep) {
    const Index N = 3 + static_cast<Index>(rng() % 10);
    const Index shocks = 3;
    std::vector<SystemPtr> sys;
    std::vector<Period> periods;
    std::vector<Vec> ys, cs, ds;
    Index prev = 3;
    for (Index t = 0; t < N; ++t) {
      // Dimensions change over time to exercise non-square transitions.
      const Index dim = 2 + static_cast<Index>(rng() % 3);
      const Index obs = static_cast<Index>(rng() % 3);
      auto s = random_system(dim, prev, obs, shocks, rng, rep % 2 == 0);
      s.c0 = random_matrix(obs, 1, rng);
      s.d0 = random_matrix(dim, 1, rng);
      sys.push_back(std::make_shared<const StateSpaceSystem>(s));
      const Vec y = random_matrix(obs, 1, rng);
      periods.push_back({t, sys.back(), y, s.c0, s.d0});
      ys.push_back(y);
      cs.push_back(s.c0);
      ds.push_back(s.d0);
      prev = dim;
    }
    const FilterState prior{random_matrix(3, 1, rng), random_spd(3, rng)};
    const FilterPass pass = filter_pass(prior, periods);
    const SmoothPass sm = smooth_pass(pass.records, Vec::Zero(sys.back()->state_dim()));
    const auto ref = joint_gaussian_means(prior, sys, ys, cs, ds);
    for (std::size_t t = 0; t < sys.size(); ++t) {
      const double scale = std::max(1.0, ref[t].cwiseAbs().maxCoeff());
      CHECK((sm.a_smooth[t] - ref[t]).cwiseAbs().maxCoeff() / scale < 1e-8);
    }
  }
}

TEST_CASE("init: stationary AR(1)") {
  const VarParams params(1, 0, 1, Vec::Zero(1), Mat::Constant(1, 1, 0.5), {Mat::Identity(1, 1)});
  const Mat p = stationary_covariance(params, 1);
  CHECK(p(0, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  const FilterState st = init_state(params, 2);
  CHECK(st.P(0, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(st.P(0, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("init: zero coefficients give the shock covariance") {
  std::mt19937_64 rng(24);
  const Mat w = random_lower(3, rng);
  const VarParams params(2, 1, 2, Vec::Zero(3), Mat::Zero(3, 6), {w});
  const Mat p = stationary_covariance(params, 3);
  const Mat sigma = w * w.transpose();
  for (Index g = 0; g < 3; ++g) CHECK((p.block(3 * g, 3 * g, 3, 3) - sigma).cwiseAbs().maxCoeff() < 1e-14);
  const Mat q = stationary_quarterly_covariance(params, 3);
  CHECK(q.isApprox(sigma(2, 2) * Mat::Identity(3, 3), 1e-14));
}

TEST_CASE("init: Lyapunov residual for random stable VARs") {
  std::mt19937_64 rng(25);
  for (int rep = 0; rep < 5; ++rep) {
    const VarParams params = random_var(3, 1 + static_cast<Index>(rng() % 2), 3, 0.9, rng);
    const Index groups = params.p() + 1;
    const Mat p = stationary_covariance(params, groups);
    const Mat f = params.companion(groups);
    Mat omega = Mat::Zero(p.rows(), p.cols());
    omega.topLeftCorner(params.n(), params.n()) = params.sigma(0);
    const Mat resid = p - f * p * f.transpose() - omega;
    CHECK(resid.cwiseAbs().maxCoeff() < 1e-10 * std::max(1.0, p.cwiseAbs().maxCoeff()));

    // The quarterly block from the MA weights agrees with the full solution.
    const Mat q = stationary_quarterly_covariance(params, groups);
    IndexList qpos;
    for (Index g = 0; g < groups; ++g)
      for (Index k = 0; k < params.n_q(); ++k) qpos.push_back(g * params.n() + params.n_m() + k);
    CHECK((q - p(qpos, qpos)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("init: explosive VAR needs the diffuse proxy") {
  const VarParams params(1, 1, 1, Vec::Zero(2), 1.1 * Mat::Identity(2, 2), {Mat::Identity(2, 2)});
  CHECK_THROWS_AS(init_state(params, 4), InitializationError);
  const FilterState d = init_state(params, 4, {InitMode::DiffuseProxy, 1e4});
  CHECK(d.a.isZero(0.0));
  CHECK(d.P == 1e4 * Mat::Identity(4, 4));
}

TEST_CASE("init: unconditional mean") {
  Vec c(2);
  c << 1.0, 2.0;
  const VarParams params(1, 1, 1, c, 0.5 * Mat::Identity(2, 2), {Mat::Identity(2, 2)});
  const FilterState st = init_state(params, 4);
  CHECK(st.a(0) == doctest::Approx(2.0));
  CHECK(st.a(1) == doctest::Approx(4.0));
  CHECK(st.a(2) == doctest::Approx(2.0));
}

TEST_CASE("innovations are white on a long simulated series") {
  std::mt19937_64 rng(26);
  std::normal_distribution<double> normal;
  auto s = random_system(3, 3, 2, 3, rng, true);
  const SystemPtr sys = std::make_shared<const StateSpaceSystem>(s);
  const Index T = 5000;
  Vec alpha = Vec::Zero(3);
  FilterState state{Vec::Zero(3), Mat::Zero(3, 3)};
  Vec sum = Vec::Zero(2);
  for (Index t = 0; t < T; ++t) {
    Vec e(3);
    for (Index i = 0; i < 3; ++i) e(i) = normal(rng);
    alpha = s.T * alpha + s.H * e;
    const Vec y = s.Z * alpha + s.G * e;
    // The state recursion above is the one the filter predicts with.
    state = predict_from(state, s, s.d0);
    FilterRecord rec = filter_update(state, sys, y, s.c0, t);
    Eigen::LLT<Mat> llt(rec.F);
    sum += llt.matrixL().solve(rec.v);
    state = {rec.a_filt, rec.P_filt};
  }
  const Vec mean = sum / static_cast<double>(T);
  CHECK(mean.cwiseAbs().maxCoeff() < 4.0 / std::sqrt(static_cast<double>(T * 2)));
}
