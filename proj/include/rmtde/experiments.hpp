#pragma once

#include "rmtde/covariance_opt.hpp"
#include "rmtde/monte_carlo.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rmtde {

struct ExperimentConfig {
  ScenarioSpec scenario;
  bool has_scenario = false;
  std::vector<double> snr_grid_db;  // sweep grid of 1/sigma2 in dB
  int trials = 0;
  std::uint64_t master_seed = 1;
  std::vector<cxd> z_points;
  std::vector<FadingSpec> cv_sweep;
  double sigma2 = 1.0;
  std::optional<double> snr_db;  // alternative to sigma2 for single-point commands
  SolveOptions solve;
  bool bits = false;
  int threads = 1;

  double sigma2_effective() const;
};

// Reads an experiment config; "scenario" may be an inline object or a path
// (resolved relative to the config file). Throws ConfigError on any problem.
ExperimentConfig load_config(const std::string& path);

struct Table {
  std::string name;  // file stem; written as <out_dir>/<name>.csv
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

std::string format_value(double v);  // 9 significant digits, C locale
void emit_plotdata(const std::string& out_dir, const std::vector<Table>& tables);

int run_solve(const ExperimentConfig& cfg, std::ostream& out);
int run_sweep_snr(const ExperimentConfig& cfg, const std::string& out_dir);
int run_variance_vs_cv(const ExperimentConfig& cfg, const std::string& out_dir);
int run_optimize_covariance(const ExperimentConfig& cfg, const std::string& out_dir);
int run_validate(const ExperimentConfig& cfg, std::ostream& out);

// Full dispatcher used by the command-line tool. Maps failures to exit codes:
// 1 malformed config, 2 solver non-convergence, 3 validation failure.
int run_command(const std::string& command, const std::string& config_path,
                const std::string& out_dir, std::optional<std::uint64_t> seed_override,
                std::optional<int> threads_override, bool bits, std::ostream& out,
                std::ostream& err);

// Deterministically constructed scenarios exercised by `validate` and shipped
// under scenarios/ as JSON.
std::vector<std::pair<std::string, ScenarioSpec>> default_scenario_suite();

// Runs every model invariant against one scenario; throws ValidationError
// with a locating message on the first violation.
void run_invariant_suite(const std::string& name, const ScenarioSpec& spec, std::ostream& log);

}  // namespace rmtde
