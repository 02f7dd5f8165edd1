#include "rmtde/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <thread>

namespace rmtde {

namespace {

// One-pass mean/variance cell with the parallel-merge rule; per-trial cells
// are combined through a fixed pairwise tree so the result is independent of
// evaluation order and thread count.
struct MeanVar {
  long long count = 0;
  cxd mean{};
  double m2 = 0.0;  // sum |x - mean|^2

  static MeanVar of(cxd x) { return {1, x, 0.0}; }

  static MeanVar merge(const MeanVar& a, const MeanVar& b) {
    if (a.count == 0) return b;
    if (b.count == 0) return a;
    MeanVar out;
    out.count = a.count + b.count;
    const cxd delta = b.mean - a.mean;
    const double wb = static_cast<double>(b.count) / static_cast<double>(out.count);
    out.mean = a.mean + delta * wb;
    out.m2 = a.m2 + b.m2 + std::norm(delta) * static_cast<double>(a.count) * wb;
    return out;
  }

  double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
};

MeanVar tree_reduce(const std::vector<cxd>& values, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return MeanVar::of(values[lo]);
  const std::size_t mid = lo + (hi - lo) / 2;
  return MeanVar::merge(tree_reduce(values, lo, mid), tree_reduce(values, mid, hi));
}

void parallel_trials(int trials, int threads, const std::function<void(int)>& body) {
  threads = std::max(1, std::min(threads, trials));
  if (threads == 1) {
    for (int t = 0; t < trials; ++t) body(t);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      for (int t = w; t < trials; t += threads) body(t);
    });
  }
  for (auto& th : pool) th.join();
}

RealVector hermitian_eigenvalues(const Matrix& B, const char* what) {
  check_hermitian(B, what);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(B, Eigen::EigenvaluesOnly);
  return eig.eigenvalues();
}

double logdet_hpd(const Matrix& A) {
  Eigen::LLT<Matrix> llt(A);
  if (llt.info() != Eigen::Success)
    throw SolverError("empirical_mutual_info: matrix is not positive definite");
  double acc = 0.0;
  for (Index i = 0; i < A.rows(); ++i) acc += std::log(llt.matrixLLT()(i, i).real());
  return 2.0 * acc;
}

}  // namespace

cxd empirical_stieltjes(const Matrix& B, cxd z) {
  if (z.imag() == 0.0 && z.real() >= 0.0)
    throw std::invalid_argument("empirical_stieltjes: z must lie off [0, inf)");
  const RealVector lam = hermitian_eigenvalues(B, "empirical_stieltjes");
  cxd acc(0.0, 0.0);
  for (Index i = 0; i < lam.size(); ++i) acc += 1.0 / (lam(i) - z);
  return acc / static_cast<double>(lam.size());
}

double empirical_mutual_info(const ChannelDraw& draw, double sigma2) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("empirical_mutual_info: sigma2 must be positive");
  const Index N = draw.H.rows();
  if (draw.S.size() != 0 && !draw.S.isZero(0.0)) {
    const Matrix I = Matrix::Identity(N, N);
    const double full = logdet_hpd(I + draw.S + (1.0 / sigma2) * (draw.H * draw.H.adjoint()));
    const double base = logdet_hpd(I + draw.S);
    return (full - base) / static_cast<double>(N);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(draw.H * draw.H.adjoint(), Eigen::EigenvaluesOnly);
  double acc = 0.0;
  for (Index i = 0; i < N; ++i) acc += std::log1p(std::max(0.0, eig.eigenvalues()(i)) / sigma2);
  return acc / static_cast<double>(N);
}

double Esd::cdf(double lambda) const {
  const auto* begin = eigenvalues.data();
  const auto* end = begin + eigenvalues.size();
  return static_cast<double>(std::upper_bound(begin, end, lambda) - begin) /
         static_cast<double>(eigenvalues.size());
}

Esd esd(const Matrix& B) { return Esd{hermitian_eigenvalues(B, "esd")}; }

EnsembleResult run_ensemble(const ScenarioSpec& spec, Quantity quantity,
                            const std::vector<cxd>& grid, int trials, std::uint64_t master_seed,
                            int threads) {
  if (trials < 1) throw std::invalid_argument("run_ensemble: trials must be at least 1");
  if (grid.empty()) throw std::invalid_argument("run_ensemble: empty evaluation grid");
  for (const cxd& g : grid) {
    if (quantity == Quantity::MutualInfo && (g.imag() != 0.0 || !(g.real() > 0.0)))
      throw std::invalid_argument("run_ensemble: mutual information grid must be positive sigma2");
    if (quantity == Quantity::Stieltjes && g.imag() == 0.0 && g.real() >= 0.0)
      throw std::invalid_argument("run_ensemble: Stieltjes grid points must lie off [0, inf)");
  }

  const ScenarioFactors factors = ScenarioFactors::make(spec);
  const std::size_t P = grid.size();
  std::vector<std::vector<cxd>> values(P, std::vector<cxd>(trials));

  parallel_trials(trials, threads, [&](int t) {
    const ChannelDraw draw = assemble_channel(spec, factors, mix_seed(master_seed, t));
    if (quantity == Quantity::MutualInfo && !spec.has_interference()) {
      // one eigendecomposition serves the whole sigma2 grid
      Eigen::SelfAdjointEigenSolver<Matrix> eig(draw.H * draw.H.adjoint(), Eigen::EigenvaluesOnly);
      for (std::size_t p = 0; p < P; ++p) {
        double acc = 0.0;
        for (Index i = 0; i < spec.N; ++i)
          acc += std::log1p(std::max(0.0, eig.eigenvalues()(i)) / grid[p].real());
        values[p][t] = acc / static_cast<double>(spec.N);
      }
    } else if (quantity == Quantity::MutualInfo) {
      for (std::size_t p = 0; p < P; ++p) values[p][t] = empirical_mutual_info(draw, grid[p].real());
    } else {
      const RealVector lam = hermitian_eigenvalues(draw.B, "run_ensemble");
      for (std::size_t p = 0; p < P; ++p) {
        cxd acc(0.0, 0.0);
        for (Index i = 0; i < lam.size(); ++i) acc += 1.0 / (lam(i) - grid[p]);
        values[p][t] = acc / static_cast<double>(lam.size());
      }
    }
  });

  EnsembleResult out;
  out.quantity = quantity;
  out.grid = grid;
  out.trials = trials;
  out.master_seed = master_seed;
  out.points.resize(P);
  for (std::size_t p = 0; p < P; ++p) {
    const MeanVar mv = tree_reduce(values[p], 0, values[p].size());
    out.points[p] = PointStats{mv.mean, mv.variance()};
  }
  return out;
}

DistributionGap distribution_gap(const ScenarioSpec& spec, cxd z, int trials,
                                 std::uint64_t master_seed, int threads) {
  if (trials < 1) throw std::invalid_argument("distribution_gap: trials must be at least 1");
  if (z.imag() == 0.0 && z.real() >= 0.0)
    throw std::invalid_argument("distribution_gap: z must lie off [0, inf)");

  ScenarioSpec gaussian = spec;
  for (auto& u : gaussian.users) u.fading = FadingSpec::gaussian();

  const ScenarioFactors factors = ScenarioFactors::make(spec);
  std::vector<cxd> diff(trials);
  parallel_trials(trials, threads, [&](int t) {
    const std::uint64_t seed = mix_seed(master_seed, t);
    const cxd m_spec = empirical_stieltjes(assemble_channel(spec, factors, seed).B, z);
    const cxd m_gauss = empirical_stieltjes(assemble_channel(gaussian, factors, seed).B, z);
    diff[t] = m_spec - m_gauss;
  });

  const MeanVar mv = tree_reduce(diff, 0, diff.size());
  DistributionGap out;
  out.gap = std::abs(mv.mean);
  out.std_error = std::sqrt(mv.variance() / static_cast<double>(trials));
  return out;
}

}  // namespace rmtde
