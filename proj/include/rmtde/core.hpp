#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>

namespace rmtde {

using cxd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Scenario/experiment input that cannot be parsed or fails validation.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A fixed-point solve or downstream numeric step failed to converge.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An invariant of the model was violated (validation suite).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Deterministic 64-bit mixing hash; derives independent per-trial and
// per-user seeds from a master seed so ensembles are order-independent.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index);

}  // namespace rmtde
