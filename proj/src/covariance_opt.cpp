#include "rmtde/covariance_opt.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace rmtde {

RealVector waterfill_allocation(const RealVector& gains, double budget) {
  const Index n = gains.size();
  if (n == 0) throw std::invalid_argument("waterfill_allocation: empty gains vector");
  if (!(budget > 0.0)) throw std::invalid_argument("waterfill_allocation: budget must be positive");
  if ((gains.array() <= 0.0).any())
    throw std::invalid_argument("waterfill_allocation: gains must be positive");

  const RealVector inv = gains.cwiseInverse();
  if ((inv.array() == inv(0)).all())
    return RealVector::Constant(n, budget / static_cast<double>(n));

  double lo = inv.minCoeff();                 // total power 0
  double hi = inv.maxCoeff() + budget;        // total power >= budget
  for (int it = 0; it < 200 && (hi - lo) > 1e-15 * std::max(1.0, hi); ++it) {
    const double mu = 0.5 * (lo + hi);
    const double total = (mu - inv.array()).max(0.0).sum();
    (total > budget ? hi : lo) = mu;
  }
  const double mu = 0.5 * (lo + hi);
  RealVector p = (mu - inv.array()).max(0.0);
  p *= budget / p.sum();
  return p;
}

CovarianceSolution optimize_covariance(const ScenarioSpec& spec, double sigma2,
                                       const CovarianceOptions& opts) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("optimize_covariance: sigma2 must be positive");
  if (spec.has_los())
    throw std::invalid_argument("optimize_covariance: requires Hbar = 0 (eigenbasis alignment)");
  if (spec.has_interference()) throw std::invalid_argument("optimize_covariance: requires S = 0");

  const Index K = spec.K();
  CovarianceSolution sol;
  sol.t_eigs.resize(K);
  sol.mode_power.resize(K);
  std::vector<Matrix> basis(K);

  for (Index k = 0; k < K; ++k) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(spec.users[k].T);
    sol.t_eigs[k] = eig.eigenvalues().cwiseMax(0.0);
    basis[k] = eig.eigenvectors();
    sol.mode_power[k] = RealVector::Ones(spec.users[k].n);
    if (!(sol.t_eigs[k].maxCoeff() > 0.0))
      throw std::invalid_argument("optimize_covariance: T_k has no positive eigenvalue");
  }

  ScenarioSpec eff = spec;
  double prev_rate = -std::numeric_limits<double>::infinity();

  for (int outer = 1; outer <= opts.max_outer; ++outer) {
    for (Index k = 0; k < K; ++k) {
      const RealVector lam_eff = sol.t_eigs[k].cwiseProduct(sol.mode_power[k]);
      Matrix Teff = basis[k] * lam_eff.cast<cxd>().asDiagonal() * basis[k].adjoint();
      eff.users[k].T = 0.5 * (Teff + Teff.adjoint());
    }

    const DetEquivResult r = solve_fixed_point(eff, cxd(-sigma2, 0.0), opts.solve);
    if (!r.state.converged)
      throw SolverError("optimize_covariance: inner fixed-point solve did not converge at outer "
                        "iteration " + std::to_string(outer));
    const double rate = shannon_from_result(eff, r);
    sol.rate_trajectory.push_back(rate);
    sol.rate = rate;
    sol.iterations = outer;

    if (outer > 1 && std::abs(rate - prev_rate) <= opts.rate_tol * std::max(1.0, std::abs(rate)))
      break;
    if (outer == opts.max_outer)
      throw SolverError("optimize_covariance: no convergence within max outer iterations "
                        "(oscillating allocation?)");
    prev_rate = rate;

    for (Index k = 0; k < K; ++k) {
      const double ek = r.state.e(k).real();
      const RealVector& lam = sol.t_eigs[k];
      const double lam_max = lam.maxCoeff();
      std::vector<Index> active;
      for (Index j = 0; j < lam.size(); ++j)
        if (lam(j) > 1e-14 * lam_max) active.push_back(j);

      RealVector gains(static_cast<Index>(active.size()));
      for (std::size_t a = 0; a < active.size(); ++a)
        gains(static_cast<Index>(a)) = spec.beta(k) * ek * lam(active[a]);

      const RealVector p_active =
          waterfill_allocation(gains, static_cast<double>(spec.users[k].n));
      RealVector p = RealVector::Zero(lam.size());
      for (std::size_t a = 0; a < active.size(); ++a) p(active[a]) = p_active(static_cast<Index>(a));
      sol.mode_power[k] = p;
    }
  }

  sol.Q.resize(K);
  for (Index k = 0; k < K; ++k) {
    Matrix Q = basis[k] * sol.mode_power[k].cast<cxd>().asDiagonal() * basis[k].adjoint();
    sol.Q[k] = 0.5 * (Q + Q.adjoint());
  }
  return sol;
}

}  // namespace rmtde
