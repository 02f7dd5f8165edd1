#pragma once

#include "rmtde/det_equiv.hpp"

namespace rmtde {

// p_i = max(0, mu - 1/gains_i), with the water level mu found by bisection so
// that sum p_i matches the budget to 1e-12 relative (exactly after the final
// rescale). Equal gains short-circuit to the exactly uniform allocation.
RealVector waterfill_allocation(const RealVector& gains, double budget);

struct CovarianceOptions {
  double rate_tol = 1e-8;  // outer stop on rate improvement
  int max_outer = 200;
  SolveOptions solve{1e-12, 20000, 0.5};  // tight inner tolerance keeps the ascent monotone
};

struct CovarianceSolution {
  std::vector<Matrix> Q;               // n_k x n_k, Hermitian PSD, tr Q_k = n_k
  std::vector<RealVector> t_eigs;      // eigenvalues of T_k, ascending
  std::vector<RealVector> mode_power;  // allocation over the same eigenmodes
  double rate = 0.0;                   // nats per receive dimension at the solution
  int iterations = 0;
  std::vector<double> rate_trajectory;  // nondecreasing; first entry is the uniform-power rate
};

// Alternating maximization of the deterministic-equivalent rate over input
// covariances: (a) solve the fixed point for the effective transmit matrices
// T_k^{1/2} Q_k T_k^{1/2}, (b) water-fill each user over the eigenmodes of T_k
// with per-mode gains beta_k e_k(-sigma2) lambda_j(T_k). Q_k shares the
// eigenbasis of T_k throughout. Requires Hbar = 0 and S = 0.
CovarianceSolution optimize_covariance(const ScenarioSpec& spec, double sigma2,
                                       const CovarianceOptions& opts = {});

}  // namespace rmtde
