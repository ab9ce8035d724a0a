#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "oracles/gaussian_linear.hpp"
#include "samplenet/errors.hpp"
#include "samplenet/gaussian.hpp"
#include "samplenet/network.hpp"

using namespace samplenet;
using namespace samplenet::gaussian;
using Catch::Matchers::WithinAbs;

namespace {

Eigen::VectorXd realized_history(const GaussianTrajectory& tr, const NetworkGraph& g, int i,
                                 int t) {
  Eigen::VectorXd h(1 + t * g.degree(i));
  h(0) = tr.signals(i);
  int r = 1;
  for (int s = 0; s < t; ++s) {
    for (int j : g.neighbors(i)) h(r++) = tr.messages(s, j);
  }
  return h;
}

struct Case {
  const char* name;
  NetworkGraph g;
  std::vector<double> a;
};

std::vector<Case> small_cases() {
  return {
      {"edge", build_topology(TopologyKind::Edge, 2), {1.0, 2.0}},
      {"path3", build_topology(TopologyKind::Path, 3), {0.5, 1.5, -1.0}},
      {"cycle4", build_topology(TopologyKind::Cycle, 4), {1.0, 0.5, 2.0, 1.5}},
      {"clique4", build_topology(TopologyKind::Clique, 4), {1.0, 2.0, 3.0, 0.0}},
  };
}

}  // namespace

TEST_CASE("initial moments and posteriors") {
  const auto g = build_topology(TopologyKind::Edge, 2);
  const auto s = GaussianSignalStructure::from_coefficients({1.0, 2.0});
  const auto st = init_moments(g, s);
  CHECK(st.round() == 0);
  CHECK(st.mean_coeffs(0)(0) == 1.0);
  CHECK(st.mean_coeffs(1)(0) == 2.0);
  CHECK(st.covariance(0, 0)(0, 0) == 1.0);
  CHECK(st.covariance(0, 1)(0, 0) == 0.0);

  const auto p0 = posterior_params(st, 0);
  CHECK_THAT(p0.variance, WithinAbs(0.5, 1e-15));
  CHECK_THAT(p0.weights(0), WithinAbs(0.5, 1e-15));
  const auto p1 = posterior_params(st, 1);
  CHECK_THAT(p1.variance, WithinAbs(0.2, 1e-15));
  CHECK_THAT(p1.weights(0), WithinAbs(0.4, 1e-15));

  const auto zero = init_moments(g, GaussianSignalStructure::from_coefficients({0.0, 1.0}));
  const auto pz = posterior_params(zero, 0);
  CHECK(pz.variance == 1.0);
  CHECK(pz.weights(0) == 0.0);
}

TEST_CASE("one step on the edge matches hand-computed moments") {
  const auto g = build_topology(TopologyKind::Edge, 2);
  const auto s = GaussianSignalStructure::from_coefficients({1.0, 2.0});
  const auto st = step_moments(init_moments(g, s), g);
  CHECK(st.round() == 1);
  // H_0(1) = (S_0, Y_1(0)); E[Y_1 | theta] = 0.8 theta, Var = 0.4^2 + 0.2.
  CHECK_THAT(st.mean_coeffs(0)(1), WithinAbs(0.8, 1e-15));
  CHECK_THAT(st.mean_coeffs(1)(1), WithinAbs(0.5, 1e-15));
  const auto c00 = st.covariance(0, 0);
  CHECK_THAT(c00(1, 1), WithinAbs(0.36, 1e-15));
  CHECK_THAT(c00(0, 1), WithinAbs(0.0, 1e-15));
  const auto c11 = st.covariance(1, 1);
  CHECK_THAT(c11(1, 1), WithinAbs(0.75, 1e-15));
  // Cross block: Cov(S_0, Y_0) = 0.5, Cov(Y_1, S_1) = 0.4, Cov(Y_1, Y_0) = 0.
  const auto c01 = st.covariance(0, 1);
  CHECK_THAT(c01(0, 1), WithinAbs(0.5, 1e-15));
  CHECK_THAT(c01(1, 0), WithinAbs(0.4, 1e-15));
  CHECK_THAT(c01(1, 1), WithinAbs(0.0, 1e-15));
  CHECK(st.covariance(1, 0).isApprox(c01.transpose()));

  CHECK_THAT(posterior_params(st, 0).variance, WithinAbs(1.0 / (1.0 + 1.0 + 0.64 / 0.36), 1e-14));
  CHECK_THAT(posterior_params(st, 1).variance, WithinAbs(0.1875, 1e-14));
}

TEST_CASE("moment recursion agrees with the brute-force linear model") {
  const int horizon = 3;
  for (const auto& c : small_cases()) {
    INFO(c.name);
    const auto s = GaussianSignalStructure::from_coefficients(c.a);
    const oracle::GaussianLinearModel ref(c.g, c.a, horizon);
    auto st = init_moments(c.g, s);
    for (int t = 0; t <= horizon; ++t) {
      INFO("t=" << t);
      for (int i = 0; i < c.g.size(); ++i) {
        CHECK((st.mean_coeffs(i) - ref.mu(i, t)).cwiseAbs().maxCoeff() <= 1e-10);
        for (int j = 0; j < c.g.size(); ++j) {
          CHECK((st.covariance(i, j) - ref.sigma(i, j, t)).cwiseAbs().maxCoeff() <= 1e-10);
        }
        const auto mine = posterior_params(st, i);
        const auto theirs = ref.posterior(i, t);
        CHECK_THAT(mine.variance, WithinAbs(theirs.variance, 1e-10));
        CHECK((mine.weights - theirs.weights).cwiseAbs().maxCoeff() <= 1e-10);
      }
      if (t < horizon) st = step_moments(std::move(st), c.g);
    }
  }
}

TEST_CASE("realized posterior means equal oracle weights applied to realized histories") {
  const int horizon = 3;
  for (const auto& c : small_cases()) {
    INFO(c.name);
    const auto s = GaussianSignalStructure::from_coefficients(c.a);
    const oracle::GaussianLinearModel ref(c.g, c.a, horizon);
    for (std::uint64_t rep = 0; rep < 5; ++rep) {
      const auto tr = simulate_realization(c.g, s, horizon, 777, rep);
      for (int t = 0; t <= horizon; ++t) {
        for (int i = 0; i < c.g.size(); ++i) {
          const double expect = ref.posterior(i, t).weights.dot(realized_history(tr, c.g, i, t));
          CHECK_THAT(tr.post_means(t, i), WithinAbs(expect, 1e-10));
        }
      }
    }
  }
}

TEST_CASE("incremental Cholesky factor reproduces a fresh factorization") {
  const auto g = build_topology(TopologyKind::Cycle, 5);
  const auto s = GaussianSignalStructure::from_coefficients({1, 2, 3, 4, 5});
  auto st = init_moments(g, s);
  for (int t = 0; t < 12; ++t) st = step_moments(std::move(st), g);
  for (int i = 0; i < 5; ++i) {
    const Eigen::MatrixXd cov = st.covariance(i, i);
    const Eigen::MatrixXd fresh = cov.llt().matrixL();
    const Eigen::MatrixXd inc = st.cholesky(i).triangularView<Eigen::Lower>();
    CHECK((inc - fresh).cwiseAbs().maxCoeff() <= 1e-9);
  }
  CHECK(st.jitter_events().empty());
}

TEST_CASE("schedule invariants on fig-2 style graphs") {
  const std::vector<double> a{1, 2, 3, 4, 5, 6, 7};
  const auto s = GaussianSignalStructure::from_coefficients(a);
  double precision = 1.0;
  for (double v : a) precision += v * v;
  const double sigma_inf = 1.0 / precision;
  CHECK_THAT(sigma_inf, WithinAbs(1.0 / 141.0, 1e-16));

  for (auto kind : {TopologyKind::Clique, TopologyKind::Cycle, TopologyKind::Path}) {
    const auto g = build_topology(kind, 7);
    auto st = init_moments(g, s);
    std::vector<double> prev(7, 1.0);
    for (int t = 0; t <= 20; ++t) {
      for (int i = 0; i < 7; ++i) {
        const double v = posterior_params(st, i).variance;
        CHECK(v <= prev[i] + 1e-15);
        CHECK(v >= sigma_inf - 1e-12);
        prev[i] = v;
        const Eigen::MatrixXd cov = st.covariance(i, i);
        CHECK((cov - cov.transpose()).cwiseAbs().maxCoeff() == 0.0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
        CHECK(eig.eigenvalues().minCoeff() > -1e-10);
      }
      if (t < 20) st = step_moments(std::move(st), g);
    }
  }
}

TEST_CASE("first-round posterior mean and the Bayes oracle") {
  const auto s = GaussianSignalStructure::from_coefficients({1.0, 2.0});
  const std::vector<double> signals{-0.371, -1.08};
  const auto oracle = bayes_oracle(s, signals);
  CHECK_THAT(oracle.mean, WithinAbs((-0.371 - 2.16) / 6.0, 1e-15));
  CHECK_THAT(oracle.mean, WithinAbs(-0.42183333333333334, 1e-12));
  CHECK_THAT(oracle.variance, WithinAbs(1.0 / 6.0, 1e-15));

  const auto fig2 = GaussianSignalStructure::from_coefficients({1, 2, 3, 4, 5, 6, 7});
  const std::vector<double> zeros(7, 0.0);
  CHECK_THAT(bayes_oracle(fig2, zeros).variance, WithinAbs(1.0 / 141.0, 1e-16));

  const auto silent = GaussianSignalStructure::from_coefficients({0.0, 0.0});
  const std::vector<double> any{3.0, -2.0};
  CHECK(bayes_oracle(silent, any).mean == 0.0);
  CHECK(bayes_oracle(silent, any).variance == 1.0);

  // X_i(0) = a_i S_i / (a_i^2 + 1)
  const auto st = init_moments(build_topology(TopologyKind::Edge, 2), s);
  Eigen::VectorXd h(1);
  h(0) = -0.371;
  CHECK_THAT(posterior_params(st, 0).mean(h), WithinAbs(-0.1855, 1e-15));
  h(0) = -1.08;
  CHECK_THAT(posterior_params(st, 1).mean(h), WithinAbs(-0.432, 1e-15));
}

TEST_CASE("realizations are deterministic in (seed, replica)") {
  const auto g = build_topology(TopologyKind::Cycle, 4);
  const auto s = GaussianSignalStructure::from_coefficients({1, 1, 2, 2});
  const auto a = simulate_realization(g, s, 30, 42, 3);
  const auto b = simulate_realization(g, s, 30, 42, 3);
  const auto c = simulate_realization(g, s, 30, 42, 4);
  CHECK(a.theta == b.theta);
  CHECK(a.messages == b.messages);
  CHECK(a.post_means == b.post_means);
  CHECK(a.theta != c.theta);

  const auto schedule = compute_schedule(g, s, 30);
  const auto d = simulate_realization(g, s, schedule, 42, 3);
  CHECK(d.post_means == a.post_means);
  CHECK(d.post_vars == a.post_vars);
}

TEST_CASE("posterior means are martingales with Var X_i(t) = 1 - sigma_i(t)") {
  const auto g = build_topology(TopologyKind::Edge, 2);
  const auto s = GaussianSignalStructure::from_coefficients({1.0, 2.0});
  const int horizon = 6;
  const auto schedule = compute_schedule(g, s, horizon);
  const int reps = 20000;
  std::vector<double> x3(reps), x6(reps), inc(reps);
  for (int r = 0; r < reps; ++r) {
    const auto tr = simulate_realization(g, s, schedule, 2024, r);
    x3[r] = tr.post_means(3, 0);
    x6[r] = tr.post_means(6, 0);
    inc[r] = (x6[r] - x3[r]) * x3[r];
  }
  auto mean = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    return m / v.size();
  };
  auto sd = [&](const std::vector<double>& v) {
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / (v.size() - 1));
  };
  // Increments orthogonal to the past.
  CHECK(std::abs(mean(inc)) <= 4.0 * sd(inc) / std::sqrt(reps));
  // Mean zero under the N(0, 1) prior.
  CHECK(std::abs(mean(x6)) <= 4.0 * sd(x6) / std::sqrt(reps));
  // Variance of the posterior mean.
  const double sigma = schedule.at(6, 0).variance;
  std::vector<double> sq(reps);
  for (int r = 0; r < reps; ++r) sq[r] = x6[r] * x6[r];
  CHECK(std::abs(mean(sq) - (1.0 - sigma)) <= 4.0 * sd(sq) / std::sqrt(reps));
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(GaussianSignalStructure::from_coefficients({1.0, std::nan("")}), ValidationError);
  const auto g = build_topology(TopologyKind::Edge, 2);
  CHECK_THROWS_AS(init_moments(g, GaussianSignalStructure::from_coefficients({1.0})),
                  ValidationError);
  const auto st = init_moments(g, GaussianSignalStructure::from_coefficients({1.0, 2.0}));
  CHECK_THROWS_AS(step_moments(st, build_topology(TopologyKind::Path, 3)), ValidationError);
}
