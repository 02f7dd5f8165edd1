#pragma once

#include "rmtde/channel_models.hpp"

namespace rmtde {

struct SolveOptions {
  double tol = 1e-10;    // convergence threshold on max|de| + max|de_tilde|
  int max_iter = 10000;
  double damping = 0.5;  // Picard damping; halved down to 1/16 on sustained residual growth
};

struct FixedPointState {
  cxd z{};
  Vector e;        // K entries
  Vector e_tilde;  // K entries
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct DetEquivResult {
  FixedPointState state;
  Matrix Psi;                            // N x N
  Matrix Psi_tilde;                      // n x n
  Matrix Phi;                            // N x N
  std::vector<Matrix> Phi_tilde_blocks;  // n_k x n_k per user
  cxd stieltjes{};                       // (1/N) tr Psi

  Matrix Phi_tilde() const;  // assembled block diagonal
};

// Damped Picard iteration on the coupled system
//   e_i = (1/N) tr(R_i Psi),  e_tilde_i = (1/n_i) tr(T_i <Psi_tilde>_i),
// with Psi, Psi_tilde, Phi, Phi_tilde rebuilt from (e, e_tilde) each sweep.
// Returns converged = false (never a fabricated answer) when max_iter is hit.
DetEquivResult solve_fixed_point(const ScenarioSpec& spec, cxd z, const SolveOptions& opts = {});

// (1/N) tr Psi(z) from a converged solve; throws SolverError otherwise.
cxd det_stieltjes(const ScenarioSpec& spec, cxd z, const SolveOptions& opts = {});

// Deterministic per-receive-dimension mutual information in nats, from the
// closed form at z = -sigma2. Requires S = 0.
double det_shannon(const ScenarioSpec& spec, double sigma2, const SolveOptions& opts = {});

// Same closed form evaluated directly from a converged solve at z = -sigma2.
double shannon_from_result(const ScenarioSpec& spec, const DetEquivResult& result);

struct IntegralOptions {
  double rel_tol = 1e-8;  // quadrature termination target
  int max_depth = 12;
  SolveOptions solve{};
};

// Cross-check path: integrates 1/w - (1/N) tr Psi(-w) from sigma2 upward,
// splitting at w_max = max(1e4, 100 * first moment, 100 * sigma2) and adding
// the analytic O(1/w^2) tail beyond the split.
double shannon_via_integral(const ScenarioSpec& spec, double sigma2,
                            const IntegralOptions& opts = {});

struct UniquenessDiagnostic {
  RealMatrix u1, u2, v1, v2;  // K x K interaction blocks
  RealMatrix Gamma;           // 4K x 4K nonnegative matrix
  double spectral_radius = 0.0;
};

// Solution-quality certificate: spectral_radius < 1 together with
// 1 - u2_ii > 0 and 1 - v2_ii > 0 certifies the computed fixed point.
// Throws SolverError when a margin 1 - u2_ii or 1 - v2_ii is non-positive.
UniquenessDiagnostic uniqueness_diagnostic(const ScenarioSpec& spec, const DetEquivResult& result);

struct MomentIdentity {
  double trace_formula = 0.0;  // (1/N) sum_k tr(T_k) tr(R_k) / n_k + (1/N) sum_k tr(Hbar_k Hbar_k^H)
  double probe = 0.0;          // Re{-j z2 (j z2 (1/N) tr Psi(j z2) + 1)} at z2 = 1e4
};

// First-moment consistency check of the deterministic spectral measure. With
// nonzero S the probe additionally sees tr(S)/N (the measure is that of
// S + H H^H); trace_formula itself never includes S.
MomentIdentity moment_identity(const ScenarioSpec& spec, const SolveOptions& opts = {});

}  // namespace rmtde
