#pragma once

#include "rmtde/channel_models.hpp"

namespace rmtde {

// (1/N) tr(B - zI)^{-1} from the eigenvalues of a Hermitian B.
cxd empirical_stieltjes(const Matrix& B, cxd z);

// Per-receive-dimension mutual information of one draw, in nats. With S = 0
// this is (1/N) logdet(I + H H^H / sigma2); with S != 0 it is the difference
// (1/N)[logdet(I + S + H H^H / sigma2) - logdet(I + S)].
double empirical_mutual_info(const ChannelDraw& draw, double sigma2);

struct Esd {
  RealVector eigenvalues;  // ascending
  double cdf(double lambda) const;
};

Esd esd(const Matrix& B);

enum class Quantity { MutualInfo, Stieltjes };

struct PointStats {
  cxd mean{};
  double variance = 0.0;  // population of the sample (unbiased, n-1)
};

struct EnsembleResult {
  Quantity quantity{};
  std::vector<cxd> grid;  // sigma2 values (real) or z points
  std::vector<PointStats> points;
  int trials = 0;
  std::uint64_t master_seed = 0;
};

// Seeded ensemble of independent draws; per-trial seed = mix_seed(master,
// trial). Statistics are merged through a fixed pairwise reduction tree over
// the trial index, so results are identical for any thread count.
EnsembleResult run_ensemble(const ScenarioSpec& spec, Quantity quantity,
                            const std::vector<cxd>& grid, int trials, std::uint64_t master_seed,
                            int threads = 1);

struct DistributionGap {
  double gap = 0.0;
  double std_error = 0.0;
};

// Paired-seed comparison of the mean empirical Stieltjes transform under the
// scenario's fading law against complex Gaussian fading with identical
// deterministic matrices.
DistributionGap distribution_gap(const ScenarioSpec& spec, cxd z, int trials,
                                 std::uint64_t master_seed, int threads = 1);

}  // namespace rmtde
