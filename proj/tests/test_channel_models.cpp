#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rmtde/channel_models.hpp"
#include "rmtde/scenario_io.hpp"
#include "oracles.hpp"

#include <cmath>
#include <filesystem>

using namespace rmtde;

namespace {

Matrix identity(Index n) { return Matrix::Identity(n, n); }

double sampled_modulus_cv(const FadingSpec& f, Index rows, Index cols, std::uint64_t seed) {
  const Matrix X = sample_fading(f, rows, cols, seed);
  const double scale = std::sqrt(static_cast<double>(cols));  // undo the 1/sqrt(cols)
  double mean = 0.0, second = 0.0;
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const double w = std::abs(X(i, j)) * scale;
      mean += w;
      second += w * w;
    }
  const double count = static_cast<double>(rows) * static_cast<double>(cols);
  mean /= count;
  second /= count;
  return std::sqrt(second - mean * mean) / mean;
}

}  // namespace

TEST_CASE("mix_seed is deterministic and spreads indices") {
  CHECK(mix_seed(1, 0) == mix_seed(1, 0));
  CHECK(mix_seed(1, 0) != mix_seed(1, 1));
  CHECK(mix_seed(1, 0) != mix_seed(2, 0));
  CHECK(mix_seed(0, 0) != 0);
}

TEST_CASE("coefficient of variation closed forms") {
  // Rayleigh modulus: E W = sqrt(pi)/2, E W^2 = 1  =>  CV = sqrt(4/pi - 1)
  const double rayleigh = std::sqrt(4.0 / 3.14159265358979323846 - 1.0);
  CHECK(cv_of(FadingSpec::gaussian()) == doctest::Approx(rayleigh).epsilon(1e-12));
  // Nakagami with m = 1 is the Rayleigh amplitude
  CHECK(cv_of(FadingSpec::nakagami(1.0)) == doctest::Approx(rayleigh).epsilon(1e-12));
  // direct Gamma-moment evaluation, independent of the lgamma-based code path
  for (double m : {0.5, 0.75, 2.0, 6.5}) {
    const double mu = std::tgamma(m + 0.5) / (std::tgamma(m) * std::sqrt(m));
    CHECK(cv_of(FadingSpec::nakagami(m)) ==
          doctest::Approx(std::sqrt(1.0 / (mu * mu) - 1.0)).epsilon(1e-12));
  }
  // log-normal: CV = sqrt(exp(sigma^2) - 1); cv = 1 needs sigma^2 = log 2
  CHECK(cv_of(FadingSpec::lognormal(std::sqrt(std::log(2.0)))) ==
        doctest::Approx(1.0).epsilon(1e-12));
  const FadingSpec two = FadingSpec::lognormal_with_cv(2.0);
  CHECK(cv_of(two) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(two.sigma == doctest::Approx(std::sqrt(std::log(5.0))).epsilon(1e-12));

  double prev = 10.0;
  for (double m : {0.5, 0.8, 1.0, 3.0, 12.0}) {
    CHECK(cv_of(FadingSpec::nakagami(m)) < prev);
    prev = cv_of(FadingSpec::nakagami(m));
  }
}

TEST_CASE("fading samples: unit power, phase symmetry, modulus law") {
  for (const FadingSpec& f : {FadingSpec::gaussian(), FadingSpec::nakagami(0.6),
                              FadingSpec::lognormal_with_cv(1.0)}) {
    const Matrix X = sample_fading(f, 1000, 1000, 99);
    const double second = X.squaredNorm() / 1000.0;  // cols/(rows*cols) = 1/rows
    CHECK(second == doctest::Approx(1.0).epsilon(0.01));
    // zero mean from the uniform phase; the sum of 1e6 entries has std ~ 0.032
    CHECK(std::abs(X.sum()) / 1000.0 <= 0.12);
    CHECK(sampled_modulus_cv(f, 1000, 1000, 17) == doctest::Approx(cv_of(f)).epsilon(0.015));
  }
}

TEST_CASE("fading sampling is bitwise reproducible and validates parameters") {
  const Matrix A = sample_fading(FadingSpec::nakagami(2.5), 16, 16, 1234);
  const Matrix B = sample_fading(FadingSpec::nakagami(2.5), 16, 16, 1234);
  CHECK((A - B).norm() == 0.0);
  const Matrix C = sample_fading(FadingSpec::nakagami(2.5), 16, 16, 1235);
  CHECK((A - C).norm() != 0.0);
  CHECK_THROWS_AS(sample_fading(FadingSpec::nakagami(0.5), 2, 2, 1), std::invalid_argument);
  CHECK_THROWS_AS(FadingSpec::nakagami(0.0), std::invalid_argument);
  CHECK_THROWS_AS(FadingSpec::lognormal(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(FadingSpec::lognormal_with_cv(0.0), std::invalid_argument);
}

TEST_CASE("ULA correlation matches brute-force quadrature") {
  struct Case { double mean, spread; };
  for (const Case& c : {Case{0.0, 10.0}, Case{30.0, 5.0}, Case{-45.0, 20.0}}) {
    const Matrix A = ula_correlation(4, c.mean, c.spread);
    for (Index p = 0; p < 4; ++p)
      for (Index q = 0; q < 4; ++q) {
        const cxd ref = oracles::ula_entry_quadrature(static_cast<int>(p - q), c.mean, c.spread);
        CHECK(std::abs(A(p, q) - ref) <= 1e-9);
      }
  }
}

TEST_CASE("ULA correlation structure") {
  const Matrix A = ula_correlation(8, 12.0, 7.0);
  CHECK((A - A.adjoint()).norm() <= 1e-12);
  for (Index p = 0; p < 8; ++p) CHECK(A(p, p) == cxd(1.0, 0.0));
  for (Index p = 0; p + 1 < 8; ++p)
    for (Index q = 0; q + 1 < 8; ++q) CHECK(std::abs(A(p + 1, q + 1) - A(p, q)) <= 1e-14);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(A, Eigen::EigenvaluesOnly);
  CHECK(eig.eigenvalues().minCoeff() >= -1e-10);
  CHECK(A.trace().real() == doctest::Approx(8.0).epsilon(1e-14));

  // zero spread collapses to the rank-one steering outer product
  const double pi = 3.14159265358979323846;
  const Matrix Z = ula_correlation(4, 25.0, 0.0);
  for (Index p = 0; p < 4; ++p)
    for (Index q = 0; q < 4; ++q) {
      const cxd ref = std::exp(cxd(0.0, pi * static_cast<double>(p - q) * std::sin(25.0 * pi / 180.0)));
      CHECK(std::abs(Z(p, q) - ref) <= 1e-14);
    }
  CHECK(ula_correlation(1, 0.0, 5.0)(0, 0) == cxd(1.0, 0.0));
  CHECK_THROWS_AS(ula_correlation(0, 0.0, 5.0), std::invalid_argument);
  CHECK_THROWS_AS(ula_correlation(4, 0.0, -1.0), std::invalid_argument);
}

TEST_CASE("build_scenario normalizes traces and rejects bad structure") {
  UserSpec u;
  u.n = 6;
  u.R = 3.0 * ula_correlation(4, 10.0, 15.0);
  u.T = 0.25 * ula_correlation(6, 0.0, 20.0);
  u.Hbar = 2.0 * random_los_matrix(4, 6, 7);
  const ScenarioSpec spec = build_scenario(4, {u});
  CHECK(spec.users[0].R.trace().real() == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(spec.users[0].T.trace().real() == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(spec.users[0].Hbar.squaredNorm() == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(spec.beta(0) == doctest::Approx(4.0 / 6.0));
  CHECK(spec.n_total() == 6);
  CHECK(spec.has_los());
  CHECK_FALSE(spec.has_interference());

  // empty matrices default to identity / zero
  const ScenarioSpec id = build_scenario(4, {UserSpec{4, {}, {}, {}, FadingSpec::gaussian()}});
  CHECK((id.users[0].R - identity(4)).norm() == 0.0);
  CHECK((id.users[0].T - identity(4)).norm() == 0.0);
  CHECK(id.users[0].Hbar.isZero(0.0));
  CHECK(id.S.isZero(0.0));

  // dimension and positivity violations
  CHECK_THROWS_AS(build_scenario(0, {UserSpec{4}}), std::invalid_argument);
  CHECK_THROWS_AS(build_scenario(4, {}), std::invalid_argument);
  CHECK_THROWS_AS(build_scenario(4, {UserSpec{0}}), std::invalid_argument);
  UserSpec bad_dim;
  bad_dim.n = 4;
  bad_dim.R = identity(3);
  CHECK_THROWS_AS(build_scenario(4, {bad_dim}), std::invalid_argument);
  UserSpec not_psd;
  not_psd.n = 2;
  not_psd.R = Matrix(2, 2);
  not_psd.R << cxd(1, 0), cxd(2, 0), cxd(2, 0), cxd(1, 0);
  CHECK_THROWS_AS(build_scenario(2, {not_psd}), std::invalid_argument);
  UserSpec not_herm;
  not_herm.n = 2;
  not_herm.T = Matrix(2, 2);
  not_herm.T << cxd(1, 0), cxd(0.5, 0.1), cxd(0.5, -0.2), cxd(1, 0);
  CHECK_THROWS_AS(build_scenario(2, {not_herm}), std::invalid_argument);
  Matrix s_bad = -identity(2);
  CHECK_THROWS_AS(build_scenario(2, {UserSpec{2}}, s_bad), std::invalid_argument);
}

TEST_CASE("line-of-sight plus several users requires diagonal receive correlation") {
  UserSpec los_diag;
  los_diag.n = 4;
  los_diag.R = random_diagonal_correlation(4, 5);
  los_diag.Hbar = random_los_matrix(4, 4, 6);
  UserSpec plain;
  plain.n = 4;

  CHECK_NOTHROW(build_scenario(4, {los_diag, plain}));

  UserSpec full_r = plain;
  full_r.R = ula_correlation(4, 10.0, 10.0);
  // one user: any PSD receive correlation is allowed next to a mean component
  CHECK_NOTHROW(build_scenario(4, {[&] {
                  UserSpec u = full_r;
                  u.Hbar = random_los_matrix(4, 4, 8);
                  return u;
                }()}));
  // two users with a mean component force diagonal receive correlations
  CHECK_THROWS_AS(build_scenario(4, {los_diag, full_r}), std::invalid_argument);
}

TEST_CASE("channel assembly: power accounting and deterministic parts") {
  UserSpec u1{8, ula_correlation(8, 5.0, 20.0), ula_correlation(8, -10.0, 12.0), {},
              FadingSpec::lognormal_with_cv(1.0)};
  UserSpec u2{12, {}, ula_correlation(12, 30.0, 8.0), {}, FadingSpec::gaussian()};
  const ScenarioSpec spec = build_scenario(8, {u1, u2});

  for (const auto& entry : power_check(spec, 400, 2024)) {
    CHECK(entry.empirical == doctest::Approx(entry.analytic).epsilon(0.05));
  }

  const ChannelDraw d1 = assemble_channel(spec, 555);
  const ChannelDraw d2 = assemble_channel(spec, 555);
  CHECK((d1.H - d2.H).norm() == 0.0);
  CHECK(d1.H.rows() == 8);
  CHECK(d1.H.cols() == 20);
  CHECK((d1.B - (d1.S + d1.H * d1.H.adjoint())).norm() <= 1e-12 * d1.B.norm());

  // zero cores leave exactly the deterministic component
  UserSpec los{4, {}, {}, random_los_matrix(4, 4, 31), FadingSpec::gaussian()};
  const ScenarioSpec sl = build_scenario(4, {los});
  const std::vector<Matrix> zeros{Matrix::Zero(4, 4)};
  const ChannelDraw dz = assemble_channel_with_cores(sl, zeros);
  CHECK((dz.H - sl.users[0].Hbar).norm() == 0.0);
  CHECK((dz.B - sl.users[0].Hbar * sl.users[0].Hbar.adjoint()).norm() <= 1e-14);
}

TEST_CASE("hermitian_sqrt squares back") {
  Matrix A = ula_correlation(5, 18.0, 9.0);
  const Matrix root = hermitian_sqrt(A);
  CHECK((root * root - A).norm() <= 1e-12 * A.norm());
  CHECK((root - root.adjoint()).norm() <= 1e-12);
}

TEST_CASE("random model inputs are normalized") {
  const Matrix D = random_diagonal_correlation(6, 11);
  CHECK(D.trace().real() == doctest::Approx(6.0).epsilon(1e-12));
  CHECK((D - Matrix(D.diagonal().asDiagonal())).norm() == 0.0);
  for (Index i = 0; i < 6; ++i) CHECK(D(i, i).real() > 0.0);
  const Matrix L = random_los_matrix(6, 9, 12);
  CHECK(L.squaredNorm() == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("scenario JSON round trip") {
  UserSpec u1{8, random_diagonal_correlation(8, 41), ula_correlation(8, 14.0, 11.0),
              random_los_matrix(8, 8, 42), FadingSpec::nakagami(0.7)};
  UserSpec u2{6, random_diagonal_correlation(8, 43), ula_correlation(6, -25.0, 16.0),
              random_los_matrix(8, 6, 44), FadingSpec::lognormal_with_cv(2.0)};
  const ScenarioSpec spec = build_scenario(8, {u1, u2}, 0.3 * identity(8));

  const std::string text = scenario_to_json_string(spec);
  const ScenarioSpec back = scenario_from_json_string(text);
  REQUIRE(back.K() == 2);
  CHECK(back.N == 8);
  for (Index k = 0; k < 2; ++k) {
    CHECK((back.users[k].R - spec.users[k].R).norm() <= 1e-12);
    CHECK((back.users[k].T - spec.users[k].T).norm() <= 1e-12);
    CHECK((back.users[k].Hbar - spec.users[k].Hbar).norm() <= 1e-12);
    CHECK(back.users[k].fading.family_name() == spec.users[k].fading.family_name());
  }
  CHECK((back.S - spec.S).norm() <= 1e-12);

  const std::filesystem::path path = std::filesystem::path("io_test") / "scenario.json";
  std::filesystem::create_directories(path.parent_path());
  save_scenario(spec, path.string());
  const ScenarioSpec loaded = load_scenario(path.string());
  CHECK((loaded.users[1].T - spec.users[1].T).norm() <= 1e-12);
  std::filesystem::remove_all("io_test");

  CHECK_THROWS_AS(scenario_from_json_string("not json"), ConfigError);
  CHECK_THROWS_AS(scenario_from_json_string("{}"), ConfigError);
  CHECK_THROWS_AS(scenario_from_json_string(R"({"N": 2, "users": []})"), ConfigError);
  CHECK_THROWS_AS(load_scenario("does/not/exist.json"), ConfigError);

  const auto with_fading = [](const std::string& fading) {
    return scenario_from_json_string(R"({"N": 2, "users": [{"n": 2, "fading": )" + fading +
                                     "}]}");
  };
  const ScenarioSpec via_cv = with_fading(R"({"family": "lognormal", "cv": 2.0})");
  CHECK(via_cv.users[0].fading.sigma ==
        doctest::Approx(FadingSpec::lognormal_with_cv(2.0).sigma).epsilon(1e-15));
  CHECK_THROWS_AS(with_fading(R"({"family": "lognormal"})"), ConfigError);
  CHECK_THROWS_AS(with_fading(R"({"family": "lognormal", "sigma": 1.0, "cv": 2.0})"),
                  ConfigError);
}
