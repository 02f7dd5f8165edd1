#include "rmtde/covariance_opt.hpp"
#include "rmtde/det_equiv.hpp"
#include "rmtde/experiments.hpp"
#include "rmtde/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace rmtde {

namespace {

void fail(const std::string& where, const std::string& what) {
  throw ValidationError(where + ": " + what);
}

void check(bool ok, const std::string& where, const std::string& what) {
  if (!ok) fail(where, what);
}

void note(std::ostream& log, const std::string& where, const std::string& what) {
  log << "ok " << where << ": " << what << "\n";
}

bool equal_matrices(const Matrix& A, const Matrix& B, double tol) {
  return A.rows() == B.rows() && A.cols() == B.cols() && (A - B).norm() <= tol;
}

void check_ula_properties(std::ostream& log) {
  const std::string where = "ula_correlation";
  for (Index n : {1, 2, 4, 8}) {
    for (double mean : {0.0, 30.0, -45.0}) {
      for (double spread : {0.0, 2.0, 10.0, 30.0}) {
        const Matrix A = ula_correlation(n, mean, spread);
        check((A - A.adjoint()).norm() <= 1e-12 * n, where, "Hermitian");
        for (Index p = 0; p < n; ++p) check(A(p, p) == cxd(1.0, 0.0), where, "unit diagonal");
        for (Index p = 0; p + 1 < n; ++p)
          for (Index q = 0; q + 1 < n; ++q)
            check(std::abs(A(p + 1, q + 1) - A(p, q)) <= 1e-14, where, "Toeplitz");
        Eigen::SelfAdjointEigenSolver<Matrix> eig(A, Eigen::EigenvaluesOnly);
        check(eig.eigenvalues().minCoeff() >= -1e-10 * eig.eigenvalues().maxCoeff(), where,
              "positive semidefinite");
        check(std::abs(A.trace().real() - static_cast<double>(n)) <= 1e-12 * n, where, "trace n");
      }
    }
  }
  const Matrix A0 = ula_correlation(4, 0.0, 0.0);
  check((A0.cwiseAbs().array() - 1.0).abs().maxCoeff() <= 1e-14, "ula_correlation",
        "zero spread collapses to unit-modulus entries");
  note(log, where, "Hermitian Toeplitz PSD with unit diagonal across parameter grid");
}

void check_fading_laws(std::ostream& log) {
  const std::string where = "sample_fading";
  const std::vector<FadingSpec> families = {
      FadingSpec::gaussian(), FadingSpec::nakagami(0.6), FadingSpec::nakagami(1.0),
      FadingSpec::lognormal_with_cv(1.0)};
  for (const auto& f : families) {
    const Matrix X = sample_fading(f, 1000, 1000, 20250401);
    // entries carry 1/sqrt(cols); undo for the raw second moment
    const double second = X.squaredNorm() * 1000.0 / (1000.0 * 1000.0);
    check(std::abs(second - 1.0) <= 0.01, where,
          f.family_name() + ": unit second moment (got " + std::to_string(second) + ")");
  }
  const Matrix X1 = sample_fading(FadingSpec::nakagami(0.75), 20, 20, 7);
  const Matrix X2 = sample_fading(FadingSpec::nakagami(0.75), 20, 20, 7);
  check((X1 - X2).norm() == 0.0, where, "seed determinism");
  note(log, where, "unit power and seed determinism across families");

  double prev = std::numeric_limits<double>::infinity();
  for (double m : {0.5, 1.0, 2.0, 5.0, 20.0}) {
    const double cv = cv_of(FadingSpec::nakagami(m));
    check(cv < prev, "cv_of", "strictly decreasing in the Nakagami shape");
    prev = cv;
  }
  note(log, "cv_of", "monotone in Nakagami shape");
}

void check_waterfill_basics(std::ostream& log) {
  RealVector g2(2);
  g2 << 2.0, 1.0;
  const RealVector p = waterfill_allocation(g2, 1.0);
  check(std::abs(p(0) - 0.75) <= 1e-12 && std::abs(p(1) - 0.25) <= 1e-12, "waterfill_allocation",
        "two-mode reference allocation");
  const RealVector u = waterfill_allocation(RealVector::Constant(4, 3.0), 2.0);
  check((u.array() == 0.5).all(), "waterfill_allocation", "equal gains give exact uniform split");
  RealVector gx(2);
  gx << 1e9, 1e-9;
  const RealVector px = waterfill_allocation(gx, 1e-3);
  check(px(1) == 0.0 && std::abs(px(0) - 1e-3) <= 1e-15, "waterfill_allocation",
        "budget concentrates on the strong mode");
  note(log, "waterfill_allocation", "reference allocations");
}

void check_variance_shrinks_with_dimension(std::ostream& log) {
  const double sigma2 = std::pow(10.0, -3.0);  // 30 dB
  auto variance_at = [&](Index N) {
    ScenarioSpec s = build_scenario(N, {UserSpec{N, {}, {}, {}, FadingSpec::gaussian()}});
    const EnsembleResult r =
        run_ensemble(s, Quantity::MutualInfo, {cxd(sigma2, 0.0)}, 2000, 97531);
    return r.points[0].variance;
  };
  const double v4 = variance_at(4);
  const double v16 = variance_at(16);
  check(v16 < v4, "run_ensemble",
        "mutual-information variance shrinks from N=4 (" + std::to_string(v4) + ") to N=16 (" +
            std::to_string(v16) + ")");
  note(log, "run_ensemble", "variance shrinks with dimension");
}

double derivative_error(const ScenarioSpec& spec, double sigma2, double h) {
  const double exact =
      det_stieltjes(spec, cxd(-sigma2, 0.0)).real() - 1.0 / sigma2;
  const double fd = (det_shannon(spec, sigma2 + h) - det_shannon(spec, sigma2 - h)) / (2.0 * h);
  return std::abs(fd - exact);
}

}  // namespace

void run_invariant_suite(const std::string& name, const ScenarioSpec& spec, std::ostream& log) {
  const Index K = spec.K();
  const double trS = spec.S.trace().real() / static_cast<double>(spec.N);

  // normalization and structure
  for (Index k = 0; k < K; ++k) {
    const auto& u = spec.users[k];
    check(std::abs(u.R.trace().real() - spec.N) <= 1e-10 * spec.N, name, "tr(R) = N");
    check(std::abs(u.T.trace().real() - u.n) <= 1e-10 * u.n, name, "tr(T) = n");
    if (!u.Hbar.isZero(0.0))
      check(std::abs(u.Hbar.squaredNorm() - spec.N) <= 1e-10 * spec.N, name, "tr(Hbar Hbar^H) = N");
    try {
      check_hermitian_psd(u.R, "R");
      check_hermitian_psd(u.T, "T");
      check_hermitian_psd(spec.S, "S");
    } catch (const std::invalid_argument& ex) {
      fail(name, ex.what());
    }
  }
  note(log, name, "normalization and PSD structure");

  // fixed point on the negative axis
  const SolveOptions opts;
  for (double sigma2 : {0.5, 2.0}) {
    const DetEquivResult r = solve_fixed_point(spec, cxd(-sigma2, 0.0), opts);
    check(r.state.converged, name, "solver converged at sigma2 " + std::to_string(sigma2));
    for (Index k = 0; k < K; ++k) {
      check(r.state.e(k).real() > 0.0 && std::abs(r.state.e(k).imag()) <= 1e-12, name,
            "e real and positive");
      check(r.state.e_tilde(k).real() > 0.0 && std::abs(r.state.e_tilde(k).imag()) <= 1e-12, name,
            "e_tilde real and positive");
    }
    const double m = r.stieltjes.real();
    check(m > 0.0 && m < 1.0 / sigma2, name, "stieltjes value inside (0, 1/sigma2)");
    for (Index k = 0; k < K; ++k) {
      const cxd e_again =
          (spec.users[k].R.transpose().cwiseProduct(r.Psi)).sum() / static_cast<double>(spec.N);
      check(std::abs(e_again - r.state.e(k)) <= 2.0 * opts.tol, name, "self-consistency of e");
    }
    const UniquenessDiagnostic diag = uniqueness_diagnostic(spec, r);
    for (Index k = 0; k < K; ++k) {
      check(1.0 - diag.u2(k, k) > 0.0, name, "margin 1 - u2_ii positive");
      check(1.0 - diag.v2(k, k) > 0.0, name, "margin 1 - v2_ii positive");
    }
    check(diag.spectral_radius < 1.0, name,
          "spectral radius " + std::to_string(diag.spectral_radius) + " below one");
  }
  note(log, name, "fixed point: positivity, self-consistency, uniqueness certificate");

  // permutation invariance
  if (K > 1) {
    ScenarioSpec rev = spec;
    std::reverse(rev.users.begin(), rev.users.end());
    const cxd m_fwd = det_stieltjes(spec, cxd(-1.0, 0.0));
    const cxd m_rev = det_stieltjes(rev, cxd(-1.0, 0.0));
    check(std::abs(m_fwd - m_rev) <= 10.0 * opts.tol, name, "user permutation invariance");
    note(log, name, "user permutation invariance");
  }

  // large-noise asymptote: e_i -> tr(R_i)/(N sigma2)
  {
    const DetEquivResult r = solve_fixed_point(spec, cxd(-1e6, 0.0), opts);
    check(r.state.converged, name, "solver converged at sigma2 1e6");
    for (Index k = 0; k < K; ++k) {
      const double target = spec.users[k].R.trace().real() / (spec.N * 1e6);
      check(std::abs(r.state.e(k).real() - target) <= 0.01 * target, name,
            "large-noise asymptote of e");
    }
  }

  // moment identities
  {
    const MomentIdentity mi = moment_identity(spec);
    const double expected = spec.has_los() ? 2.0 * K : 1.0 * K;
    check(std::abs(mi.trace_formula - expected) <= 1e-10 * expected, name,
          "trace formula equals " + std::to_string(expected));
    const double probe_target = mi.trace_formula + trS;
    check(std::abs(mi.probe - probe_target) <= 1e-3 * probe_target, name,
          "large-|z| probe matches the first moment");
  }
  note(log, name, "moment identities");

  if (!spec.has_interference()) {
    // Shannon-transform checks
    double prev = -1.0;
    for (double sigma2 : {10.0, 1.0, 0.1}) {
      const double v = det_shannon(spec, sigma2);
      check(v > prev, name, "mutual information increases as noise falls");
      prev = v;
    }
    const double closed = det_shannon(spec, 1.0);
    const double integral = shannon_via_integral(spec, 1.0);
    check(std::abs(integral - closed) <= 1e-3 * std::max(1.0, std::abs(closed)), name,
          "integral representation matches the closed form");
    for (double sigma2 : {0.5, 1.0, 2.0, 5.0}) {
      const double e1 = derivative_error(spec, sigma2, 1e-2);
      const double e2 = derivative_error(spec, sigma2, 5e-3);
      check(e2 <= e1 / 3.5, name,
            "derivative identity: finite-difference error shrinks at second order (sigma2 " +
                std::to_string(sigma2) + ")");
    }
    note(log, name, "Shannon transform: monotonicity, integral cross-check, derivative identity");
  }

  // Monte-Carlo counterparts
  {
    const ChannelDraw draw = assemble_channel(spec, 1234);
    const cxd m_up = empirical_stieltjes(draw.B, cxd(0.3, 0.7));
    check(m_up.imag() > 0.0, name, "Stieltjes transform maps upper half plane to itself");
    double prev_mi = std::numeric_limits<double>::infinity();
    for (double sigma2 : {0.1, 1.0, 10.0}) {
      const double mi = empirical_mutual_info(draw, sigma2);
      check(mi <= prev_mi, name, "mutual information nonincreasing in noise");
      prev_mi = mi;
    }

    // heavy-amplitude families (log-normal CV=2 has E W^4 = 625) make the
    // sample mean of tr(B)/N skewed at small draw counts, so this check needs
    // both a large sample and a wide band to be sound for any fixed seed
    const int draws = 8000;
    double mean = 0.0, m2 = 0.0;
    const ScenarioFactors factors = ScenarioFactors::make(spec);
    for (int t = 0; t < draws; ++t) {
      const ChannelDraw d = assemble_channel(spec, factors, mix_seed(777, t));
      const double v = d.B.trace().real() / static_cast<double>(spec.N);
      const double delta = v - mean;
      mean += delta / (t + 1);
      m2 += delta * (v - mean);
    }
    const double target = (spec.has_los() ? 2.0 * K : 1.0 * K) + trS;
    const double se = std::sqrt(m2 / (draws - 1) / draws);
    check(std::abs(mean - target) <= 5.0 * se + 1e-9, name,
          "mean normalized trace of B within five standard errors of its target");

    const std::vector<cxd> grid{cxd(1.0, 0.0)};
    const EnsembleResult one = run_ensemble(spec, Quantity::MutualInfo, grid, 1, 42);
    check(one.points[0].variance == 0.0, name, "single-trial ensemble has zero variance");
    const EnsembleResult a = run_ensemble(spec, Quantity::MutualInfo, grid, 3, 42);
    const EnsembleResult b = run_ensemble(spec, Quantity::MutualInfo, grid, 3, 42);
    check(a.points[0].mean == b.points[0].mean && a.points[0].variance == b.points[0].variance,
          name, "ensemble reproducibility");
  }
  note(log, name, "Monte-Carlo counterparts");

  // covariance optimization
  if (!spec.has_los() && !spec.has_interference()) {
    const CovarianceSolution sol = optimize_covariance(spec, 1.0);
    for (Index k = 0; k < K; ++k) {
      const auto& u = spec.users[k];
      check(std::abs(sol.Q[k].trace().real() - u.n) <= 1e-10 * u.n, name, "tr(Q) = n");
      const double comm = (sol.Q[k] * u.T - u.T * sol.Q[k]).norm();
      check(comm <= 1e-10 * u.T.norm() * std::max(1.0, sol.Q[k].norm()), name,
            "Q commutes with T");
    }
    for (std::size_t i = 1; i < sol.rate_trajectory.size(); ++i)
      check(sol.rate_trajectory[i] >= sol.rate_trajectory[i - 1] - 1e-12, name,
            "rate trajectory nondecreasing");
    check(sol.rate >= sol.rate_trajectory.front() - 1e-9, name,
          "optimized rate at least the uniform-power rate");

    ScenarioSpec swapped = spec;
    for (auto& u : swapped.users)
      u.fading = u.fading.family == FadingFamily::ComplexGaussian
                     ? FadingSpec::lognormal_with_cv(1.0)
                     : FadingSpec::gaussian();
    const CovarianceSolution sol2 = optimize_covariance(swapped, 1.0);
    check(sol.rate == sol2.rate, name, "rate invariant under fading family swap");
    bool same_q = true;
    for (Index k = 0; k < K; ++k) same_q = same_q && equal_matrices(sol.Q[k], sol2.Q[k], 0.0);
    check(same_q, name, "covariances invariant under fading family swap");
    note(log, name, "covariance optimization invariants");
  }
}

std::vector<std::pair<std::string, ScenarioSpec>> default_scenario_suite() {
  std::vector<std::pair<std::string, ScenarioSpec>> suite;

  suite.emplace_back("mp_identity",
                     build_scenario(8, {UserSpec{8, {}, {}, {}, FadingSpec::gaussian()}}));

  suite.emplace_back(
      "one_user_correlated",
      build_scenario(8, {UserSpec{12, ula_correlation(8, 10.0, 15.0), ula_correlation(12, 0.0, 10.0),
                                  {}, FadingSpec::gaussian()}}));

  suite.emplace_back(
      "one_user_los",
      build_scenario(8, {UserSpec{8, ula_correlation(8, 20.0, 10.0), ula_correlation(8, -10.0, 20.0),
                                  random_los_matrix(8, 8, 401), FadingSpec::nakagami(0.8)}}));

  suite.emplace_back(
      "two_user_mixed",
      build_scenario(8, {UserSpec{8, ula_correlation(8, 5.0, 25.0), ula_correlation(8, 10.0, 15.0),
                                  {}, FadingSpec::lognormal_with_cv(1.0)},
                         UserSpec{12, ula_correlation(8, -30.0, 20.0),
                                  ula_correlation(12, -20.0, 10.0), {}, FadingSpec::gaussian()}}));

  suite.emplace_back(
      "two_user_los_diag",
      build_scenario(8, {UserSpec{8, random_diagonal_correlation(8, 501),
                                  ula_correlation(8, 15.0, 10.0), random_los_matrix(8, 8, 503),
                                  FadingSpec::nakagami(0.6)},
                         UserSpec{8, random_diagonal_correlation(8, 502),
                                  ula_correlation(8, -15.0, 12.0), random_los_matrix(8, 8, 504),
                                  FadingSpec::lognormal_with_cv(2.0)}}));

  suite.emplace_back(
      "interference",
      build_scenario(6, {UserSpec{6, ula_correlation(6, 0.0, 30.0), {}, {}, FadingSpec::gaussian()},
                         UserSpec{6, {}, ula_correlation(6, 10.0, 18.0), {},
                                  FadingSpec::nakagami(1.5)}},
                     0.5 * ula_correlation(6, 0.0, 25.0)));

  return suite;
}

int run_validate(const ExperimentConfig& cfg, std::ostream& out) {
  check_ula_properties(out);
  check_fading_laws(out);
  check_waterfill_basics(out);
  check_variance_shrinks_with_dimension(out);

  for (const auto& [name, spec] : default_scenario_suite()) run_invariant_suite(name, spec, out);
  if (cfg.has_scenario) run_invariant_suite("config_scenario", cfg.scenario, out);

  out << "validation passed\n";
  return 0;
}

}  // namespace rmtde
