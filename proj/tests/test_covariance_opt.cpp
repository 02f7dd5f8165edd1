#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rmtde/covariance_opt.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace rmtde;

namespace {

ScenarioSpec two_mode_spec(double lam1, double lam2) {
  ScenarioSpec spec;
  spec.N = 2;
  spec.S = Matrix::Zero(2, 2);
  UserSpec u;
  u.n = 2;
  u.R = Matrix::Identity(2, 2);
  u.T = Matrix::Zero(2, 2);
  u.T(0, 0) = cxd(lam1, 0.0);
  u.T(1, 1) = cxd(lam2, 0.0);
  u.Hbar = Matrix::Zero(2, 2);
  spec.users.push_back(u);
  return spec;
}

// DE rate of an explicit diagonal power loading on the two transmit eigenmodes
double rate_of_loading(double lam1, double lam2, double p1, double p2, double sigma2) {
  ScenarioSpec spec = two_mode_spec(lam1 * p1, lam2 * p2);
  return det_shannon(spec, sigma2, SolveOptions{1e-12, 20000, 0.5});
}

}  // namespace

TEST_CASE("water-filling reference allocations") {
  RealVector g(2);
  g << 2.0, 1.0;
  const RealVector p = waterfill_allocation(g, 1.0);
  CHECK(p(0) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(p(1) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-14));

  const RealVector uniform = waterfill_allocation(RealVector::Constant(5, 0.7), 3.0);
  for (Index i = 0; i < 5; ++i) CHECK(uniform(i) == 0.6);

  RealVector spread(3);
  spread << 10.0, 1.0, 0.01;
  const RealVector q = waterfill_allocation(spread, 2.0);
  CHECK(q(2) == 0.0);  // weakest mode stays shut off (water level 1.55 << 100)
  CHECK(q(0) > q(1));
  CHECK(q(1) > 0.0);
  CHECK(q.sum() == doctest::Approx(2.0).epsilon(1e-12));
  // active modes share a common water level mu = p_i + 1/g_i
  CHECK(q(0) + 1.0 / spread(0) == doctest::Approx(q(1) + 1.0 / spread(1)).epsilon(1e-9));

  CHECK_THROWS_AS(waterfill_allocation(RealVector(), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(waterfill_allocation(g, 0.0), std::invalid_argument);
  RealVector bad(2);
  bad << 1.0, -0.5;
  CHECK_THROWS_AS(waterfill_allocation(bad, 1.0), std::invalid_argument);
}

TEST_CASE("identity transmit correlation keeps uniform power exactly") {
  const ScenarioSpec spec =
      build_scenario(4, {UserSpec{4, ula_correlation(4, 10.0, 20.0), {}, {}, FadingSpec::gaussian()}});
  const CovarianceSolution sol = optimize_covariance(spec, 1.0);
  REQUIRE(sol.mode_power.size() == 1);
  for (Index j = 0; j < 4; ++j) CHECK(sol.mode_power[0](j) == 1.0);
  CHECK((sol.Q[0] - Matrix::Identity(4, 4)).norm() <= 1e-12);
  CHECK(sol.rate == doctest::Approx(det_shannon(spec, 1.0)).epsilon(1e-8));
}

TEST_CASE("optimizer matches a brute-force search over the power simplex") {
  const double lam1 = 1.5, lam2 = 0.5, sigma2 = 1.0;
  const ScenarioSpec spec = two_mode_spec(lam1, lam2);
  const CovarianceSolution sol = optimize_covariance(spec, sigma2);

  const oracles::GridSearchResult grid = oracles::grid_search_two_modes(
      [&](double p1, double p2) { return rate_of_loading(lam1, lam2, p1, p2, sigma2); }, 2.0,
      1e-3 * 2.0);
  CHECK(std::abs(sol.rate - grid.rate) <= 1e-3);
  CHECK(sol.rate >= grid.rate - 1e-9);  // the grid is a subset of the feasible set
  // locate the stronger mode in the ascending eigenvalue ordering
  const Index strong = sol.t_eigs[0](0) > sol.t_eigs[0](1) ? 0 : 1;
  CHECK(sol.mode_power[0](strong) == doctest::Approx(grid.p1).epsilon(0.01));
  CHECK(sol.mode_power[0].sum() == doctest::Approx(2.0).epsilon(1e-12));

  for (std::size_t i = 1; i < sol.rate_trajectory.size(); ++i)
    CHECK(sol.rate_trajectory[i] >= sol.rate_trajectory[i - 1] - 1e-12);
  CHECK(sol.rate >= sol.rate_trajectory.front() - 1e-9);
}

TEST_CASE("low noise floods all modes, high noise concentrates") {
  const ScenarioSpec spec = two_mode_spec(1.5, 0.5);
  const CovarianceSolution low = optimize_covariance(spec, 1e-3);
  CHECK(low.mode_power[0].minCoeff() > 0.5);  // near-uniform when water is plentiful
  const CovarianceSolution high = optimize_covariance(spec, 25.0);
  const Index strong = high.t_eigs[0](0) > high.t_eigs[0](1) ? 0 : 1;
  CHECK(high.mode_power[0](strong) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(high.mode_power[0](1 - strong) <= 1e-6);
}

TEST_CASE("optimized covariance commutes with the transmit correlation") {
  UserSpec u1{8, ula_correlation(8, 5.0, 25.0), ula_correlation(8, 10.0, 15.0), {},
              FadingSpec::lognormal_with_cv(1.0)};
  UserSpec u2{12, ula_correlation(8, -30.0, 20.0), ula_correlation(12, -20.0, 10.0), {},
              FadingSpec::gaussian()};
  const ScenarioSpec spec = build_scenario(8, {u1, u2});
  const CovarianceSolution sol = optimize_covariance(spec, 0.5);
  for (Index k = 0; k < 2; ++k) {
    const Matrix& T = spec.users[k].T;
    const Matrix& Q = sol.Q[k];
    CHECK((Q * T - T * Q).norm() <= 1e-10 * T.norm() * Q.norm());
    CHECK(Q.trace().real() == doctest::Approx(static_cast<double>(spec.users[k].n)).epsilon(1e-10));
    CHECK((Q - Q.adjoint()).norm() <= 1e-12 * Q.norm());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(Q, Eigen::EigenvaluesOnly);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-12);
  }
  CHECK(sol.rate > det_shannon(spec, 0.5) - 1e-9);  // at least the uniform-power rate
}

TEST_CASE("the solution depends on fading only through second moments") {
  UserSpec u{8, ula_correlation(8, 5.0, 25.0), ula_correlation(8, 10.0, 15.0), {},
             FadingSpec::gaussian()};
  const ScenarioSpec a = build_scenario(8, {u});
  u.fading = FadingSpec::nakagami(0.6);
  const ScenarioSpec b = build_scenario(8, {u});
  const CovarianceSolution sa = optimize_covariance(a, 1.0);
  const CovarianceSolution sb = optimize_covariance(b, 1.0);
  CHECK(sa.rate == sb.rate);
  CHECK((sa.Q[0] - sb.Q[0]).norm() == 0.0);
}

TEST_CASE("mean components and interference are rejected") {
  UserSpec los{4, {}, {}, random_los_matrix(4, 4, 3), FadingSpec::gaussian()};
  const ScenarioSpec with_los = build_scenario(4, {los});
  CHECK_THROWS_AS(optimize_covariance(with_los, 1.0), std::invalid_argument);

  const ScenarioSpec with_s =
      build_scenario(4, {UserSpec{4, {}, {}, {}, FadingSpec::gaussian()}},
                     Matrix::Identity(4, 4));
  CHECK_THROWS_AS(optimize_covariance(with_s, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(optimize_covariance(build_scenario(4, {UserSpec{4}}), 0.0),
                  std::invalid_argument);
}
