#include "rmtde/det_equiv.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <string>

namespace rmtde {

namespace {

cxd trace_prod(const Matrix& A, const Matrix& B) {
  // tr(A B) without forming the product
  return (A.transpose().cwiseProduct(B)).sum();
}

Matrix inverse_of(const Matrix& A, bool hermitian_pd) {
  const Matrix I = Matrix::Identity(A.rows(), A.cols());
  if (hermitian_pd) {
    Eigen::LLT<Matrix> llt(A);
    if (llt.info() != Eigen::Success)
      throw SolverError("fixed-point evaluation: matrix lost positive definiteness");
    return llt.solve(I);
  }
  Eigen::PartialPivLU<Matrix> lu(A);
  Matrix X = lu.solve(I);
  if (!X.allFinite()) throw SolverError("fixed-point evaluation: singular matrix");
  return X;
}

double logdet_hpd(const Matrix& A, const char* what) {
  Eigen::LLT<Matrix> llt(A);
  if (llt.info() != Eigen::Success)
    throw SolverError(std::string(what) + ": matrix is not positive definite");
  double acc = 0.0;
  const auto& L = llt.matrixLLT();
  for (Index i = 0; i < A.rows(); ++i) acc += std::log(L(i, i).real());
  return 2.0 * acc;
}

double first_moment_with_interference(const ScenarioSpec& spec) {
  double fm = spec.S.trace().real() / static_cast<double>(spec.N);
  for (const auto& u : spec.users) {
    fm += u.T.trace().real() * u.R.trace().real() /
          (static_cast<double>(u.n) * static_cast<double>(spec.N));
    fm += u.Hbar.squaredNorm() / static_cast<double>(spec.N);
  }
  return fm;
}

void require_converged(const DetEquivResult& r, const char* what) {
  if (!r.state.converged)
    throw SolverError(std::string(what) + ": fixed point did not converge (residual " +
                      std::to_string(r.state.residual) + " after " +
                      std::to_string(r.state.iterations) + " iterations)");
}

}  // namespace

Matrix DetEquivResult::Phi_tilde() const {
  Index n = 0;
  for (const auto& b : Phi_tilde_blocks) n += b.rows();
  Matrix F = Matrix::Zero(n, n);
  Index off = 0;
  for (const auto& b : Phi_tilde_blocks) {
    F.block(off, off, b.rows(), b.cols()) = b;
    off += b.rows();
  }
  return F;
}

DetEquivResult solve_fixed_point(const ScenarioSpec& spec, cxd z, const SolveOptions& opts) {
  if (spec.N <= 0 || spec.K() == 0) throw std::invalid_argument("solve_fixed_point: empty scenario");
  if (z.imag() == 0.0 && z.real() >= 0.0)
    throw std::invalid_argument("solve_fixed_point: z must lie off the closed positive real axis");
  if (!(opts.tol > 0.0) || opts.max_iter < 1 || !(opts.damping > 0.0) || opts.damping > 1.0)
    throw std::invalid_argument("solve_fixed_point: invalid options");

  const Index N = spec.N;
  const Index K = spec.K();
  const cxd neg_inv_z = -1.0 / z;
  const bool on_negative_axis = z.imag() == 0.0;  // implies z.real() < 0
  const bool los = spec.has_los();
  const bool interference = spec.has_interference();
  const Matrix Hbar = los ? spec.stacked_Hbar() : Matrix();

  Vector e = Vector::Constant(K, neg_inv_z);
  Vector et = e;

  double damping = opts.damping;
  double prev_residual = std::numeric_limits<double>::infinity();
  int rising = 0;

  DetEquivResult out;
  out.state.z = z;

  Vector e_new(K), et_new(K);
  std::vector<Matrix> D_inv(K);

  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    if (on_negative_axis) {
      // the solution on the negative real axis is real; discard rounding dust
      e = e.real().cast<cxd>();
      et = et.real().cast<cxd>();
    }

    // D_k = I + beta_k e_k T_k   (Phi_tilde_k = (-1/z) D_k^{-1})
    for (Index k = 0; k < K; ++k) {
      const Index nk = spec.users[k].n;
      Matrix Dk = Matrix::Identity(nk, nk) + (spec.beta(k) * e(k)) * spec.users[k].T;
      D_inv[k] = inverse_of(Dk, on_negative_axis);
    }

    // M = I + sum_i et_i R_i + (-1/z) S   (Phi = (-1/z) M^{-1})
    Matrix M = Matrix::Identity(N, N);
    for (Index k = 0; k < K; ++k) M += et(k) * spec.users[k].R;
    if (interference) M += neg_inv_z * spec.S;

    // Psi = (-1/z) (M + (-1/z) sum_k Hbar_k D_k^{-1} Hbar_k^H)^{-1}
    Matrix G = M;
    if (los) {
      for (Index k = 0; k < K; ++k) {
        const auto Hk = Hbar.middleCols(spec.offset(k), spec.users[k].n);
        G += neg_inv_z * (Hk * D_inv[k] * Hk.adjoint());
      }
    }
    const Matrix G_inv = inverse_of(G, on_negative_axis);

    // Psi_tilde = (-1/z) (blockdiag(D_k) + (-1/z) Hbar^H M^{-1} Hbar)^{-1}
    Matrix Y_inv;
    if (los) {
      const Matrix M_inv = inverse_of(M, on_negative_axis);
      Matrix Y = Matrix::Zero(spec.n_total(), spec.n_total());
      for (Index k = 0; k < K; ++k) {
        const Index nk = spec.users[k].n;
        Y.block(spec.offset(k), spec.offset(k), nk, nk) =
            Matrix::Identity(nk, nk) + (spec.beta(k) * e(k)) * spec.users[k].T;
      }
      Y += neg_inv_z * (Hbar.adjoint() * M_inv * Hbar);
      Y_inv = inverse_of(Y, on_negative_axis);
    }

    for (Index k = 0; k < K; ++k) {
      e_new(k) = neg_inv_z * trace_prod(spec.users[k].R, G_inv) / static_cast<double>(N);
      const Index nk = spec.users[k].n;
      const Matrix Pt_k = los ? Matrix(Y_inv.block(spec.offset(k), spec.offset(k), nk, nk))
                              : D_inv[k];
      et_new(k) = neg_inv_z * trace_prod(spec.users[k].T, Pt_k) / static_cast<double>(nk);
    }

    const double residual = (e_new - e).cwiseAbs().maxCoeff() + (et_new - et).cwiseAbs().maxCoeff();

    if (residual <= opts.tol || iter == opts.max_iter) {
      out.state.e = e_new;
      out.state.e_tilde = et_new;
      out.state.residual = residual;
      out.state.iterations = iter;
      out.state.converged = residual <= opts.tol;

      out.Psi = neg_inv_z * G_inv;
      out.Phi = neg_inv_z * inverse_of(M, on_negative_axis);
      out.Phi_tilde_blocks.resize(K);
      for (Index k = 0; k < K; ++k) out.Phi_tilde_blocks[k] = neg_inv_z * D_inv[k];
      if (los) {
        out.Psi_tilde = neg_inv_z * Y_inv;
      } else {
        out.Psi_tilde = Matrix::Zero(spec.n_total(), spec.n_total());
        for (Index k = 0; k < K; ++k) {
          const Index nk = spec.users[k].n;
          out.Psi_tilde.block(spec.offset(k), spec.offset(k), nk, nk) = neg_inv_z * D_inv[k];
        }
      }
      out.stieltjes = out.Psi.trace() / static_cast<double>(N);
      return out;
    }

    if (residual > prev_residual) {
      if (++rising >= 5) {
        damping = std::max(damping / 2.0, 1.0 / 16.0);
        rising = 0;
      }
    } else {
      rising = 0;
    }
    prev_residual = residual;

    e += damping * (e_new - e);
    et += damping * (et_new - et);
  }
  throw std::logic_error("solve_fixed_point: unreachable");
}

cxd det_stieltjes(const ScenarioSpec& spec, cxd z, const SolveOptions& opts) {
  const DetEquivResult r = solve_fixed_point(spec, z, opts);
  require_converged(r, "det_stieltjes");
  return r.stieltjes;
}

double shannon_from_result(const ScenarioSpec& spec, const DetEquivResult& result) {
  if (result.state.z.imag() != 0.0 || result.state.z.real() >= 0.0)
    throw std::invalid_argument("shannon_from_result: needs a solve at z = -sigma2");
  require_converged(result, "shannon_from_result");
  const double sigma2 = -result.state.z.real();
  const Index N = spec.N;
  const Index K = spec.K();

  Matrix A = Matrix::Identity(N, N);
  double logdet_tx = 0.0;
  double cross = 0.0;
  for (Index k = 0; k < K; ++k) {
    const auto& u = spec.users[k];
    const double ek = result.state.e(k).real();
    const double etk = result.state.e_tilde(k).real();
    A += etk * u.R;
    const Matrix Dk = Matrix::Identity(u.n, u.n) + (spec.beta(k) * ek) * u.T;
    logdet_tx += logdet_hpd(Dk, "shannon transmit term");
    if (!u.Hbar.isZero(0.0)) {
      A += (1.0 / sigma2) * (u.Hbar * inverse_of(Dk, true) * u.Hbar.adjoint());
    }
    cross += ek * etk;
  }
  return (logdet_hpd(A, "shannon receive term") + logdet_tx) / static_cast<double>(N) -
         sigma2 * cross;
}

double det_shannon(const ScenarioSpec& spec, double sigma2, const SolveOptions& opts) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("det_shannon: sigma2 must be positive");
  if (spec.has_interference())
    throw std::invalid_argument("det_shannon: closed form requires S = 0");
  const DetEquivResult r = solve_fixed_point(spec, cxd(-sigma2, 0.0), opts);
  require_converged(r, "det_shannon");
  return shannon_from_result(spec, r);
}

double shannon_via_integral(const ScenarioSpec& spec, double sigma2, const IntegralOptions& opts) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("shannon_via_integral: sigma2 must be positive");
  if (spec.has_interference())
    throw std::invalid_argument("shannon_via_integral: requires S = 0");

  const double fm = first_moment_with_interference(spec);
  const double omega_max = std::max({1e4, 100.0 * fm, 100.0 * sigma2});

  const auto integrand = [&](double omega) {
    const DetEquivResult r = solve_fixed_point(spec, cxd(-omega, 0.0), opts.solve);
    require_converged(r, "shannon_via_integral");
    return 1.0 / omega - r.stieltjes.real();
  };

  double error = 0.0;
  const double body = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      integrand, sigma2, omega_max, opts.max_depth, opts.rel_tol, &error);
  const double tail = fm / omega_max;  // integral of fm / w^2 beyond the split
  return body + tail;
}

UniquenessDiagnostic uniqueness_diagnostic(const ScenarioSpec& spec, const DetEquivResult& result) {
  if (!result.state.converged)
    throw std::invalid_argument("uniqueness_diagnostic: requires a converged solve");
  const Index N = spec.N;
  const Index K = spec.K();
  const Index n = spec.n_total();
  const cxd z = result.state.z;

  const Matrix& Psi = result.Psi;
  const Matrix& Psi_t = result.Psi_tilde;
  const Matrix Phi_z = z * result.Phi;
  const Matrix Hbar = spec.stacked_Hbar();

  std::vector<Matrix> T_embed(K);
  for (Index k = 0; k < K; ++k) {
    T_embed[k] = Matrix::Zero(n, n);
    T_embed[k].block(spec.offset(k), spec.offset(k), spec.users[k].n, spec.users[k].n) =
        spec.users[k].T;
  }

  UniquenessDiagnostic diag;
  diag.u1.resize(K, K);
  diag.u2.resize(K, K);
  diag.v1.resize(K, K);
  diag.v2.resize(K, K);

  std::vector<Matrix> C(K), E(K);  // LOS sandwich terms per user j
  for (Index j = 0; j < K; ++j) {
    const auto Hj = Hbar.middleCols(spec.offset(j), spec.users[j].n);
    const Matrix Phi_tz_j = z * result.Phi_tilde_blocks[j];
    C[j] = Hj * Phi_tz_j * spec.users[j].T * Phi_tz_j.adjoint() * Hj.adjoint();
    E[j] = Hbar.adjoint() * Phi_z * spec.users[j].R * Phi_z.adjoint() * Hbar;
  }

  for (Index i = 0; i < K; ++i) {
    const Matrix RiPsi = spec.users[i].R * Psi;
    const Matrix TiPsi_t = T_embed[i] * Psi_t;
    for (Index j = 0; j < K; ++j) {
      diag.u1(i, j) =
          (trace_prod(RiPsi, spec.users[j].R * Psi.adjoint()) / static_cast<double>(N)).real();
      diag.u2(i, j) = (spec.beta(j) / static_cast<double>(N)) *
                      trace_prod(RiPsi, C[j] * Psi.adjoint()).real();
      diag.v1(i, j) = (spec.beta(j) / static_cast<double>(spec.users[j].n)) *
                      trace_prod(TiPsi_t, T_embed[j] * Psi_t.adjoint()).real();
      diag.v2(i, j) = (1.0 / static_cast<double>(spec.users[j].n)) *
                      trace_prod(TiPsi_t, E[j] * Psi_t.adjoint()).real();
    }
  }

  RealVector mu(K), mv(K);
  for (Index i = 0; i < K; ++i) {
    mu(i) = 1.0 - diag.u2(i, i);
    mv(i) = 1.0 - diag.v2(i, i);
    if (!(mu(i) > 0.0) || !(mv(i) > 0.0))
      throw SolverError("uniqueness_diagnostic: nonpositive margin 1 - u2_ii or 1 - v2_ii");
  }

  RealMatrix G11 = RealMatrix::Zero(K, K), G12(K, K), G21(K, K), G22 = RealMatrix::Zero(K, K);
  for (Index i = 0; i < K; ++i) {
    for (Index j = 0; j < K; ++j) {
      if (i != j) {
        G11(i, j) = diag.u2(i, j) / mu(i);
        G22(i, j) = diag.v2(i, j) / mv(i);
      }
      G12(i, j) = diag.u1(i, j) / mu(i);
      G21(i, j) = diag.v1(i, j) / mv(i);
    }
  }

  const double zz = std::norm(z);
  RealMatrix Gamma = RealMatrix::Zero(4 * K, 4 * K);
  Gamma.block(0, 0, K, K) = G11;
  Gamma.block(0, 3 * K, K, K) = G12;
  Gamma.block(K, K, K, K) = G11;
  Gamma.block(K, 2 * K, K, K) = zz * G12;
  Gamma.block(2 * K, K, K, K) = G21;
  Gamma.block(2 * K, 2 * K, K, K) = G22;
  Gamma.block(3 * K, 0, K, K) = zz * G21;
  Gamma.block(3 * K, 3 * K, K, K) = G22;
  diag.Gamma = Gamma;

  Eigen::EigenSolver<RealMatrix> eig(Gamma, false);
  diag.spectral_radius = eig.eigenvalues().cwiseAbs().maxCoeff();
  return diag;
}

MomentIdentity moment_identity(const ScenarioSpec& spec, const SolveOptions& opts) {
  MomentIdentity out;
  out.trace_formula = 0.0;
  for (const auto& u : spec.users) {
    out.trace_formula += u.T.trace().real() * u.R.trace().real() /
                         (static_cast<double>(u.n) * static_cast<double>(spec.N));
    out.trace_formula += u.Hbar.squaredNorm() / static_cast<double>(spec.N);
  }

  constexpr double z2 = 1e4;
  const DetEquivResult r = solve_fixed_point(spec, cxd(0.0, z2), opts);
  require_converged(r, "moment_identity");
  const cxd jz2(0.0, z2);
  out.probe = (-jz2 * (jz2 * r.stieltjes + 1.0)).real();
  return out;
}

}  // namespace rmtde
