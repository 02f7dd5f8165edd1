#include "rmtde/channel_models.hpp"

#include "rng.hpp"

#include <cmath>
#include <numbers>
#include <utility>

namespace rmtde {

namespace {

constexpr double kPi = std::numbers::pi;

std::string idx_name(const std::string& base, Index k) {
  return base + "[" + std::to_string(k) + "]";
}

// Gauss-Hermite nodes/weights by Golub-Welsch on the symmetric Jacobi matrix;
// weights are normalized to sum to one so the quadrature integrates a normal
// density exactly to mass one.
void gauss_hermite(int order, RealVector& nodes, RealVector& weights) {
  RealMatrix J = RealMatrix::Zero(order, order);
  for (int i = 1; i < order; ++i) {
    const double b = std::sqrt(i / 2.0);
    J(i, i - 1) = b;
    J(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> eig(J);
  nodes = eig.eigenvalues();
  weights.resize(order);
  for (int i = 0; i < order; ++i) {
    const double v0 = eig.eigenvectors()(0, i);
    weights(i) = v0 * v0;
  }
  weights /= weights.sum();
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
  // splitmix64 finalizer over the combined words
  std::uint64_t x = master + 0x9e3779b97f4a7c15ull * (index + 1);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

FadingSpec FadingSpec::gaussian() { return FadingSpec{FadingFamily::ComplexGaussian, 1.0, 1.0}; }

FadingSpec FadingSpec::nakagami(double m) {
  if (!(m >= 0.5)) throw std::invalid_argument("nakagami: shape must be at least 0.5");
  return FadingSpec{FadingFamily::NakagamiPhase, m, 1.0};
}

FadingSpec FadingSpec::lognormal(double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("lognormal: sigma must be positive");
  return FadingSpec{FadingFamily::LogNormalPhase, 1.0, sigma};
}

FadingSpec FadingSpec::lognormal_with_cv(double cv) {
  if (cv <= 0.0) throw std::invalid_argument("lognormal_with_cv: cv must be positive");
  return lognormal(std::sqrt(std::log1p(cv * cv)));
}

std::string FadingSpec::family_name() const {
  switch (family) {
    case FadingFamily::ComplexGaussian: return "gaussian";
    case FadingFamily::NakagamiPhase: return "nakagami";
    case FadingFamily::LogNormalPhase: return "lognormal";
  }
  return "unknown";
}

void FadingSpec::validate_for_sampling() const {
  if (family == FadingFamily::NakagamiPhase && !(m > 0.5))
    throw std::invalid_argument("fading: Nakagami shape must exceed 0.5");
  if (family == FadingFamily::LogNormalPhase && !(sigma > 0.0))
    throw std::invalid_argument("fading: log-normal sigma must be positive");
}

double cv_of(const FadingSpec& spec) {
  switch (spec.family) {
    case FadingFamily::ComplexGaussian:
      // Rayleigh amplitude with E{W^2} = 1: E{W} = sqrt(pi)/2
      return std::sqrt(4.0 / kPi - 1.0);
    case FadingFamily::NakagamiPhase: {
      if (!(spec.m >= 0.5)) throw std::invalid_argument("cv_of: Nakagami shape must be >= 0.5");
      // E{W} = Gamma(m + 1/2) / (Gamma(m) sqrt(m)) under E{W^2} = 1
      const double log_mu = std::lgamma(spec.m + 0.5) - std::lgamma(spec.m) - 0.5 * std::log(spec.m);
      return std::sqrt(std::expm1(-2.0 * log_mu));
    }
    case FadingFamily::LogNormalPhase:
      if (!(spec.sigma > 0.0)) throw std::invalid_argument("cv_of: log-normal sigma must be positive");
      return std::sqrt(std::expm1(spec.sigma * spec.sigma));
  }
  throw std::invalid_argument("cv_of: unknown fading family");
}

Index ScenarioSpec::n_total() const {
  Index n = 0;
  for (const auto& u : users) n += u.n;
  return n;
}

Index ScenarioSpec::offset(Index k) const {
  Index off = 0;
  for (Index i = 0; i < k; ++i) off += users[i].n;
  return off;
}

bool ScenarioSpec::has_los() const {
  for (const auto& u : users)
    if (!u.Hbar.isZero(0.0)) return true;
  return false;
}

bool ScenarioSpec::has_interference() const { return S.size() != 0 && !S.isZero(0.0); }

Matrix ScenarioSpec::stacked_Hbar() const {
  Matrix H = Matrix::Zero(N, n_total());
  Index off = 0;
  for (const auto& u : users) {
    H.middleCols(off, u.n) = u.Hbar;
    off += u.n;
  }
  return H;
}

void check_hermitian(const Matrix& A, const std::string& name, double rel_tol) {
  if (A.rows() != A.cols()) throw std::invalid_argument(name + ": matrix must be square");
  const double scale = std::max(1.0, A.norm());
  if ((A - A.adjoint()).norm() > rel_tol * scale)
    throw std::invalid_argument(name + ": matrix is not Hermitian");
}

void check_hermitian_psd(const Matrix& A, const std::string& name, double rel_tol) {
  check_hermitian(A, name, rel_tol);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(A, Eigen::EigenvaluesOnly);
  const double lam_min = eig.eigenvalues().minCoeff();
  const double lam_max = std::max(eig.eigenvalues().maxCoeff(), 0.0);
  if (lam_min < -rel_tol * std::max(lam_max, 1e-300))
    throw std::invalid_argument(name + ": matrix is not positive semidefinite");
}

Matrix hermitian_sqrt(const Matrix& A) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(A);
  RealVector lam = eig.eigenvalues().cwiseMax(0.0);
  return eig.eigenvectors() * lam.cwiseSqrt().asDiagonal() * eig.eigenvectors().adjoint();
}

ScenarioSpec build_scenario(Index N, std::vector<UserSpec> users, Matrix S) {
  if (N <= 0) throw std::invalid_argument("scenario: N must be positive");
  if (users.empty()) throw std::invalid_argument("scenario: at least one user required");

  ScenarioSpec spec;
  spec.N = N;
  spec.users = std::move(users);
  spec.S = S.size() == 0 ? Matrix::Zero(N, N) : std::move(S);

  if (spec.S.rows() != N || spec.S.cols() != N)
    throw std::invalid_argument("scenario: S must be N x N");
  check_hermitian_psd(spec.S, "S");

  const Index K = spec.K();
  for (Index k = 0; k < K; ++k) {
    auto& u = spec.users[k];
    if (u.n <= 0) throw std::invalid_argument(idx_name("user", k) + ": n must be positive");
    if (u.R.size() == 0) u.R = Matrix::Identity(N, N);
    if (u.T.size() == 0) u.T = Matrix::Identity(u.n, u.n);
    if (u.Hbar.size() == 0) u.Hbar = Matrix::Zero(N, u.n);

    if (u.R.rows() != N || u.R.cols() != N)
      throw std::invalid_argument(idx_name("R", k) + ": must be N x N");
    if (u.T.rows() != u.n || u.T.cols() != u.n)
      throw std::invalid_argument(idx_name("T", k) + ": must be n x n");
    if (u.Hbar.rows() != N || u.Hbar.cols() != u.n)
      throw std::invalid_argument(idx_name("Hbar", k) + ": must be N x n");

    check_hermitian_psd(u.R, idx_name("R", k));
    check_hermitian_psd(u.T, idx_name("T", k));

    const double trR = u.R.trace().real();
    const double trT = u.T.trace().real();
    if (trR <= 0.0) throw std::invalid_argument(idx_name("R", k) + ": zero trace, cannot normalize");
    if (trT <= 0.0) throw std::invalid_argument(idx_name("T", k) + ": zero trace, cannot normalize");
    u.R *= static_cast<double>(N) / trR;
    u.T *= static_cast<double>(u.n) / trT;

    if (!u.Hbar.isZero(0.0)) {
      const double trH = u.Hbar.squaredNorm();
      u.Hbar *= std::sqrt(static_cast<double>(N) / trH);
    }
  }

  if (K > 1 && spec.has_los()) {
    for (Index k = 0; k < K; ++k) {
      const Matrix& R = spec.users[k].R;
      if (!(R - Matrix(R.diagonal().asDiagonal())).isZero(1e-12 * std::max(1.0, R.norm())))
        throw std::invalid_argument(
            "scenario: with K > 1 and a nonzero Hbar every R_k must be diagonal");
    }
  }
  return spec;
}

Matrix ula_correlation(Index n, double mean_angle_deg, double rms_spread_deg) {
  if (n < 1) throw std::invalid_argument("ula_correlation: n must be at least 1");
  if (rms_spread_deg < 0.0) throw std::invalid_argument("ula_correlation: rms spread must be >= 0");

  const double mu = mean_angle_deg * kPi / 180.0;
  const double sd = rms_spread_deg * kPi / 180.0;

  Vector lag(n);
  if (sd == 0.0) {
    for (Index d = 0; d < n; ++d) {
      const double phase = kPi * static_cast<double>(d) * std::sin(mu);
      lag(d) = cxd(std::cos(phase), std::sin(phase));
    }
  } else {
    constexpr int kOrder = 64;
    RealVector nodes, weights;
    gauss_hermite(kOrder, nodes, weights);
    for (Index d = 0; d < n; ++d) {
      cxd acc(0.0, 0.0);
      for (int i = 0; i < kOrder; ++i) {
        const double theta = mu + std::numbers::sqrt2 * sd * nodes(i);
        const double phase = kPi * static_cast<double>(d) * std::sin(theta);
        acc += weights(i) * cxd(std::cos(phase), std::sin(phase));
      }
      lag(d) = acc;
    }
  }

  Matrix A(n, n);
  for (Index p = 0; p < n; ++p)
    for (Index q = 0; q < n; ++q) A(p, q) = p >= q ? lag(p - q) : std::conj(lag(q - p));
  for (Index p = 0; p < n; ++p) A(p, p) = 1.0;
  return A;
}

Matrix random_diagonal_correlation(Index N, std::uint64_t seed) {
  if (N < 1) throw std::invalid_argument("random_diagonal_correlation: N must be at least 1");
  detail::Rng rng(seed);
  RealVector d(N);
  for (Index i = 0; i < N; ++i) d(i) = rng.uniform_pos();
  d *= static_cast<double>(N) / d.sum();
  Matrix R = Matrix::Zero(N, N);
  R.diagonal() = d.cast<cxd>();
  return R;
}

Matrix random_los_matrix(Index N, Index n, std::uint64_t seed) {
  if (N < 1 || n < 1) throw std::invalid_argument("random_los_matrix: dimensions must be positive");
  detail::Rng rng(seed);
  Matrix M(N, n);
  for (Index c = 0; c < n; ++c)
    for (Index r = 0; r < N; ++r) M(r, c) = rng.complex_normal();
  M *= std::sqrt(static_cast<double>(N) / M.squaredNorm());
  return M;
}

Matrix sample_fading(const FadingSpec& spec, Index rows, Index cols, std::uint64_t seed) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("sample_fading: dimensions must be positive");
  spec.validate_for_sampling();

  detail::Rng rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(cols));
  Matrix X(rows, cols);
  for (Index c = 0; c < cols; ++c) {
    for (Index r = 0; r < rows; ++r) {
      double w = 0.0;
      switch (spec.family) {
        case FadingFamily::ComplexGaussian: w = std::sqrt(rng.exponential()); break;
        case FadingFamily::NakagamiPhase: w = std::sqrt(rng.gamma(spec.m) / spec.m); break;
        case FadingFamily::LogNormalPhase:
          w = std::exp(-spec.sigma * spec.sigma + spec.sigma * rng.normal());
          break;
      }
      X(r, c) = scale * w * rng.unit_phase();
    }
  }
  return X;
}

ScenarioFactors ScenarioFactors::make(const ScenarioSpec& spec) {
  ScenarioFactors f;
  f.R_sqrt.reserve(spec.users.size());
  f.T_sqrt.reserve(spec.users.size());
  for (const auto& u : spec.users) {
    f.R_sqrt.push_back(hermitian_sqrt(u.R));
    f.T_sqrt.push_back(hermitian_sqrt(u.T));
  }
  return f;
}

ChannelDraw assemble_channel(const ScenarioSpec& spec, std::uint64_t seed) {
  return assemble_channel(spec, ScenarioFactors::make(spec), seed);
}

ChannelDraw assemble_channel(const ScenarioSpec& spec, const ScenarioFactors& factors,
                             std::uint64_t seed) {
  const Index K = spec.K();
  std::vector<Matrix> X(K);
  for (Index k = 0; k < K; ++k)
    X[k] = sample_fading(spec.users[k].fading, spec.N, spec.users[k].n, mix_seed(seed, k));

  ChannelDraw draw;
  draw.X = std::move(X);
  draw.H_user.resize(K);
  draw.H.resize(spec.N, spec.n_total());
  Index off = 0;
  for (Index k = 0; k < K; ++k) {
    draw.H_user[k] =
        factors.R_sqrt[k] * draw.X[k] * factors.T_sqrt[k] + spec.users[k].Hbar;
    draw.H.middleCols(off, spec.users[k].n) = draw.H_user[k];
    off += spec.users[k].n;
  }
  draw.S = spec.S;
  draw.B = spec.S + draw.H * draw.H.adjoint();
  return draw;
}

ChannelDraw assemble_channel_with_cores(const ScenarioSpec& spec, const std::vector<Matrix>& X) {
  if (static_cast<Index>(X.size()) != spec.K())
    throw std::invalid_argument("assemble_channel_with_cores: one core per user required");
  const ScenarioFactors factors = ScenarioFactors::make(spec);
  ChannelDraw draw;
  draw.X = X;
  draw.H_user.resize(spec.users.size());
  draw.H.resize(spec.N, spec.n_total());
  Index off = 0;
  for (Index k = 0; k < spec.K(); ++k) {
    if (X[k].rows() != spec.N || X[k].cols() != spec.users[k].n)
      throw std::invalid_argument("assemble_channel_with_cores: core dimension mismatch");
    draw.H_user[k] = factors.R_sqrt[k] * X[k] * factors.T_sqrt[k] + spec.users[k].Hbar;
    draw.H.middleCols(off, spec.users[k].n) = draw.H_user[k];
    off += spec.users[k].n;
  }
  draw.S = spec.S;
  draw.B = spec.S + draw.H * draw.H.adjoint();
  return draw;
}

std::vector<PowerCheckEntry> power_check(const ScenarioSpec& spec, int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("power_check: trials must be at least 1");
  const ScenarioFactors factors = ScenarioFactors::make(spec);
  const Index K = spec.K();

  std::vector<PowerCheckEntry> out(K);
  for (Index k = 0; k < K; ++k) {
    const auto& u = spec.users[k];
    out[k].analytic = u.R.trace().real() * u.T.trace().real() / static_cast<double>(u.n) +
                      u.Hbar.squaredNorm();
  }
  for (int t = 0; t < trials; ++t) {
    const ChannelDraw draw = assemble_channel(spec, factors, mix_seed(seed, t));
    for (Index k = 0; k < K; ++k) out[k].empirical += draw.H_user[k].squaredNorm();
  }
  for (Index k = 0; k < K; ++k) out[k].empirical /= trials;
  return out;
}

}  // namespace rmtde
