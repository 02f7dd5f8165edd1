#pragma once

#include "rmtde/core.hpp"

#include <string>
#include <vector>

namespace rmtde {

enum class FadingFamily { ComplexGaussian, NakagamiPhase, LogNormalPhase };

// Amplitude-phase law for the i.i.d. entries of the random core X_k:
// entry = W * exp(j*theta), theta uniform on [0, 2*pi), E{W^2} = 1 for every
// admissible parameterization.
struct FadingSpec {
  FadingFamily family = FadingFamily::ComplexGaussian;
  double m = 1.0;      // Nakagami shape, must exceed 0.5 for sampling
  double sigma = 1.0;  // log-normal scale of log-amplitude

  static FadingSpec gaussian();
  static FadingSpec nakagami(double m);
  static FadingSpec lognormal(double sigma);
  static FadingSpec lognormal_with_cv(double cv);

  std::string family_name() const;
  void validate_for_sampling() const;
};

// Coefficient of variation sqrt(var W)/E{W} of the amplitude, from closed-form
// moments (no sampling). Accepts the boundary Nakagami shape m = 0.5.
double cv_of(const FadingSpec& spec);

struct UserSpec {
  Index n = 0;
  Matrix R;     // N x N receive correlation; empty means identity
  Matrix T;     // n x n transmit correlation; empty means identity
  Matrix Hbar;  // N x n deterministic component; empty means zero
  FadingSpec fading;
};

struct ScenarioSpec {
  Index N = 0;
  std::vector<UserSpec> users;
  Matrix S;  // N x N interference term (all-zero allowed)

  Index K() const { return static_cast<Index>(users.size()); }
  Index n_total() const;
  Index offset(Index k) const;  // first stacked column of user k
  double beta(Index k) const { return static_cast<double>(N) / static_cast<double>(users[k].n); }
  bool has_los() const;
  bool has_interference() const;
  Matrix stacked_Hbar() const;  // N x n_total
};

// Validates dimensions and PSD structure, rescales R_k, T_k, Hbar_k to
// tr(R_k) = N, tr(T_k) = n_k, tr(Hbar_k Hbar_k^H) = N, and rejects the
// unsupported combination of K > 1, a nonzero Hbar_k, and a non-diagonal R_k.
ScenarioSpec build_scenario(Index N, std::vector<UserSpec> users, Matrix S = Matrix());

// Correlation of a half-wavelength uniform linear array under a Gaussian
// azimuth distribution (mean/spread in degrees): entry(p,q) is the quadrature
// approximation of E_theta{exp(j*pi*(p-q)*sin theta)}. Hermitian Toeplitz PSD
// with unit diagonal and trace n.
Matrix ula_correlation(Index n, double mean_angle_deg, double rms_spread_deg);

// Random model inputs used by the experiment pipelines: i.i.d. uniform (0,1]
// diagonal gains rescaled to trace N, and an i.i.d. complex Gaussian matrix
// rescaled to tr(M M^H) = N.
Matrix random_diagonal_correlation(Index N, std::uint64_t seed);
Matrix random_los_matrix(Index N, Index n, std::uint64_t seed);

// i.i.d. matrix with entries (1/sqrt(cols)) * W * exp(j*theta); identical seed
// reproduces the identical matrix bit for bit.
Matrix sample_fading(const FadingSpec& spec, Index rows, Index cols, std::uint64_t seed);

struct ChannelDraw {
  std::vector<Matrix> X;       // N x n_k random cores
  std::vector<Matrix> H_user;  // R_k^{1/2} X_k T_k^{1/2} + Hbar_k
  Matrix H;                    // N x n_total
  Matrix S;                    // copy of the scenario interference term
  Matrix B;                    // S + H H^H
};

// Principal square roots of R_k and T_k, precomputed once and reused across
// many draws of the same scenario.
struct ScenarioFactors {
  std::vector<Matrix> R_sqrt;
  std::vector<Matrix> T_sqrt;
  static ScenarioFactors make(const ScenarioSpec& spec);
};

ChannelDraw assemble_channel(const ScenarioSpec& spec, std::uint64_t seed);
ChannelDraw assemble_channel(const ScenarioSpec& spec, const ScenarioFactors& factors,
                             std::uint64_t seed);
// Test hook: assemble with externally supplied cores (e.g. all-zero X).
ChannelDraw assemble_channel_with_cores(const ScenarioSpec& spec, const std::vector<Matrix>& X);

struct PowerCheckEntry {
  double empirical = 0.0;
  double analytic = 0.0;
};

// Empirical mean of tr(H_k H_k^H) over `trials` draws next to its analytic
// value tr(R_k) tr(T_k) / n_k + tr(Hbar_k Hbar_k^H).
std::vector<PowerCheckEntry> power_check(const ScenarioSpec& spec, int trials, std::uint64_t seed);

// Shared structural checks (throw std::invalid_argument on violation).
void check_hermitian(const Matrix& A, const std::string& name, double rel_tol = 1e-10);
void check_hermitian_psd(const Matrix& A, const std::string& name, double rel_tol = 1e-10);
Matrix hermitian_sqrt(const Matrix& A);

}  // namespace rmtde
