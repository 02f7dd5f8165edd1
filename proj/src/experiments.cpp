#include "rmtde/experiments.hpp"

#include "rmtde/det_equiv.hpp"
#include "rmtde/scenario_io.hpp"
#include "scenario_json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace rmtde {

namespace {

using nlohmann::json;

double require_number(const json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError("config: \"" + key + "\" must be a number");
  return j.get<double>();
}

SolveOptions solve_options_from(const json& j) {
  SolveOptions opts;
  if (!j.is_object()) throw ConfigError("config: \"solver\" must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "tol") {
      opts.tol = require_number(value, "solver.tol");
      if (!(opts.tol > 0.0)) throw ConfigError("config: solver.tol must be positive");
    } else if (key == "max_iter") {
      if (!value.is_number_integer() || value.get<long long>() < 1)
        throw ConfigError("config: solver.max_iter must be a positive integer");
      opts.max_iter = value.get<int>();
    } else if (key == "damping") {
      opts.damping = require_number(value, "solver.damping");
      if (!(opts.damping > 0.0 && opts.damping <= 1.0))
        throw ConfigError("config: solver.damping must lie in (0, 1]");
    } else {
      throw ConfigError("config: unknown solver key \"" + key + "\"");
    }
  }
  return opts;
}

}  // namespace

double ExperimentConfig::sigma2_effective() const {
  if (snr_db) return std::pow(10.0, -*snr_db / 10.0);
  return sigma2;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& ex) {
    throw ConfigError(std::string("config is not valid JSON: ") + ex.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");

  ExperimentConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "scenario") {
      if (value.is_string()) {
        const std::filesystem::path base = std::filesystem::path(path).parent_path();
        cfg.scenario = load_scenario((base / value.get<std::string>()).string());
      } else if (value.is_object()) {
        cfg.scenario = detail::scenario_from_json(value);
      } else {
        throw ConfigError("config: \"scenario\" must be an object or a path string");
      }
      cfg.has_scenario = true;
    } else if (key == "snr_grid_db") {
      if (!value.is_array()) throw ConfigError("config: \"snr_grid_db\" must be an array");
      for (const auto& v : value) cfg.snr_grid_db.push_back(require_number(v, "snr_grid_db"));
    } else if (key == "trials") {
      if (!value.is_number_integer() || value.get<long long>() < 0)
        throw ConfigError("config: \"trials\" must be a nonnegative integer");
      cfg.trials = value.get<int>();
    } else if (key == "master_seed") {
      if (!value.is_number_unsigned())
        throw ConfigError("config: \"master_seed\" must be a nonnegative integer");
      cfg.master_seed = value.get<std::uint64_t>();
    } else if (key == "z_points") {
      if (!value.is_array()) throw ConfigError("config: \"z_points\" must be an array");
      for (const auto& v : value) {
        if (!v.is_array() || v.size() != 2)
          throw ConfigError("config: each z point must be a [re, im] pair");
        cfg.z_points.emplace_back(require_number(v[0], "z_points"),
                                  require_number(v[1], "z_points"));
      }
    } else if (key == "cv_sweep") {
      if (!value.is_array()) throw ConfigError("config: \"cv_sweep\" must be an array");
      for (const auto& v : value) cfg.cv_sweep.push_back(detail::fading_from_json(v));
    } else if (key == "sigma2") {
      cfg.sigma2 = require_number(value, "sigma2");
      if (!(cfg.sigma2 > 0.0)) throw ConfigError("config: \"sigma2\" must be positive");
    } else if (key == "snr_db") {
      cfg.snr_db = require_number(value, "snr_db");
    } else if (key == "solver") {
      cfg.solve = solve_options_from(value);
    } else if (key == "bits") {
      if (!value.is_boolean()) throw ConfigError("config: \"bits\" must be a boolean");
      cfg.bits = value.get<bool>();
    } else if (key == "threads") {
      if (!value.is_number_integer() || value.get<long long>() < 1)
        throw ConfigError("config: \"threads\" must be a positive integer");
      cfg.threads = value.get<int>();
    } else {
      throw ConfigError("config: unknown key \"" + key + "\"");
    }
  }
  return cfg;
}

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void emit_plotdata(const std::string& out_dir, const std::vector<Table>& tables) {
  std::filesystem::create_directories(out_dir);
  for (const auto& t : tables) {
    const std::filesystem::path file = std::filesystem::path(out_dir) / (t.name + ".csv");
    std::ofstream out(file);
    if (!out) throw ConfigError("cannot write output file: " + file.string());
    for (std::size_t c = 0; c < t.columns.size(); ++c)
      out << (c ? "," : "") << t.columns[c];
    out << "\n";
    for (const auto& row : t.rows) {
      if (row.size() != t.columns.size())
        throw std::logic_error("table row width mismatch in " + t.name);
      for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
      out << "\n";
    }
  }
}

namespace {

const ScenarioSpec& require_scenario(const ExperimentConfig& cfg) {
  if (!cfg.has_scenario) throw ConfigError("config: this command needs a \"scenario\"");
  return cfg.scenario;
}

void print_complex_row(std::ostream& out, const std::string& label, const Vector& v) {
  out << label;
  for (Index i = 0; i < v.size(); ++i)
    out << " " << format_value(v(i).real()) << " " << format_value(v(i).imag());
  out << "\n";
}

}  // namespace

int run_solve(const ExperimentConfig& cfg, std::ostream& out) {
  const ScenarioSpec& spec = require_scenario(cfg);
  const cxd z = cfg.z_points.empty() ? cxd(-cfg.sigma2_effective(), 0.0) : cfg.z_points.front();
  const DetEquivResult r = solve_fixed_point(spec, z, cfg.solve);
  if (!r.state.converged)
    throw SolverError("solve: no convergence after " + std::to_string(r.state.iterations) +
                      " iterations (residual " + format_value(r.state.residual) + ")");
  out << "z " << format_value(z.real()) << " " << format_value(z.imag()) << "\n";
  out << "iterations " << r.state.iterations << "\n";
  out << "residual " << format_value(r.state.residual) << "\n";
  print_complex_row(out, "e", r.state.e);
  print_complex_row(out, "e_tilde", r.state.e_tilde);
  out << "stieltjes " << format_value(r.stieltjes.real()) << " "
      << format_value(r.stieltjes.imag()) << "\n";
  const UniquenessDiagnostic diag = uniqueness_diagnostic(spec, r);
  out << "rho_gamma " << format_value(diag.spectral_radius) << "\n";
  if (z.imag() == 0.0 && z.real() < 0.0 && !spec.has_interference()) {
    const double nats = shannon_from_result(spec, r);
    out << (cfg.bits ? "shannon_bits " : "shannon_nats ")
        << format_value(cfg.bits ? nats / std::numbers::ln2 : nats) << "\n";
  }
  return 0;
}

int run_sweep_snr(const ExperimentConfig& cfg, const std::string& out_dir) {
  const ScenarioSpec& spec = require_scenario(cfg);
  if (cfg.snr_grid_db.empty()) throw ConfigError("config: sweep-snr needs \"snr_grid_db\"");
  if (spec.has_interference())
    throw ConfigError("sweep-snr reports mutual information and needs a scenario without an "
                      "interference term");
  const double unit = cfg.bits ? std::numbers::ln2 : 1.0;

  std::vector<cxd> grid;
  for (double snr : cfg.snr_grid_db) grid.emplace_back(std::pow(10.0, -snr / 10.0), 0.0);

  EnsembleResult mc;
  if (cfg.trials > 0)
    mc = run_ensemble(spec, Quantity::MutualInfo, grid, cfg.trials, cfg.master_seed, cfg.threads);

  Table t;
  t.name = "sweep_snr";
  t.columns = {"snr_db", cfg.bits ? "de_bits" : "de_nats", "mc_mean", "mc_std", "trials"};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double de = det_shannon(spec, grid[i].real(), cfg.solve) / unit;
    std::vector<std::string> row{format_value(cfg.snr_grid_db[i]), format_value(de), "", "", ""};
    if (cfg.trials > 0) {
      row[2] = format_value(mc.points[i].mean.real() / unit);
      row[3] = format_value(std::sqrt(mc.points[i].variance) / unit);
      row[4] = std::to_string(cfg.trials);
    }
    t.rows.push_back(std::move(row));
  }
  emit_plotdata(out_dir, {t});
  return 0;
}

int run_variance_vs_cv(const ExperimentConfig& cfg, const std::string& out_dir) {
  const ScenarioSpec& spec = require_scenario(cfg);
  if (cfg.cv_sweep.empty()) throw ConfigError("config: variance-vs-cv needs \"cv_sweep\"");
  if (cfg.trials < 2) throw ConfigError("config: variance-vs-cv needs \"trials\" >= 2");
  const double unit2 = cfg.bits ? std::numbers::ln2 * std::numbers::ln2 : 1.0;
  const std::vector<cxd> grid{cxd(cfg.sigma2_effective(), 0.0)};

  Table t;
  t.name = "variance_vs_cv";
  t.columns = {"cv", "fading_family", "N", "empirical_variance"};
  for (const auto& fading : cfg.cv_sweep) {
    fading.validate_for_sampling();
    ScenarioSpec swept = spec;  // the sweep reassigns every user's fading family
    for (auto& u : swept.users) u.fading = fading;
    const EnsembleResult r =
        run_ensemble(swept, Quantity::MutualInfo, grid, cfg.trials, cfg.master_seed, cfg.threads);
    t.rows.push_back({format_value(cv_of(fading)), fading.family_name(),
                      std::to_string(spec.N), format_value(r.points[0].variance / unit2)});
  }
  emit_plotdata(out_dir, {t});
  return 0;
}

int run_optimize_covariance(const ExperimentConfig& cfg, const std::string& out_dir) {
  const ScenarioSpec& spec = require_scenario(cfg);
  CovarianceOptions opts;  // keep the tight inner tolerance; the config may only tighten further
  opts.solve.tol = std::min(opts.solve.tol, cfg.solve.tol);
  opts.solve.max_iter = std::max(opts.solve.max_iter, cfg.solve.max_iter);
  const CovarianceSolution sol = optimize_covariance(spec, cfg.sigma2_effective(), opts);
  const double unit = cfg.bits ? std::numbers::ln2 : 1.0;

  Table alloc;
  alloc.name = "allocations";
  alloc.columns = {"user", "mode", "t_eigenvalue", "power"};
  for (std::size_t k = 0; k < sol.t_eigs.size(); ++k)
    for (Index j = 0; j < sol.t_eigs[k].size(); ++j)
      alloc.rows.push_back({std::to_string(k), std::to_string(j),
                            format_value(sol.t_eigs[k](j)), format_value(sol.mode_power[k](j))});

  Table rates;
  rates.name = "rates";
  rates.columns = {"iteration", cfg.bits ? "rate_bits" : "rate_nats"};
  for (std::size_t i = 0; i < sol.rate_trajectory.size(); ++i)
    rates.rows.push_back({std::to_string(i + 1), format_value(sol.rate_trajectory[i] / unit)});

  emit_plotdata(out_dir, {alloc, rates});
  return 0;
}

int run_command(const std::string& command, const std::string& config_path,
                const std::string& out_dir, std::optional<std::uint64_t> seed_override,
                std::optional<int> threads_override, bool bits, std::ostream& out,
                std::ostream& err) {
  try {
    ExperimentConfig cfg = load_config(config_path);
    if (seed_override) cfg.master_seed = *seed_override;
    if (threads_override) {
      if (*threads_override < 1) throw ConfigError("--threads must be at least 1");
      cfg.threads = *threads_override;
    }
    if (bits) cfg.bits = true;

    if (command == "solve") return run_solve(cfg, out);
    if (command == "sweep-snr") return run_sweep_snr(cfg, out_dir);
    if (command == "variance-vs-cv") return run_variance_vs_cv(cfg, out_dir);
    if (command == "optimize-covariance") return run_optimize_covariance(cfg, out_dir);
    if (command == "validate") return run_validate(cfg, out);
    throw ConfigError("unknown command: " + command);
  } catch (const SolverError& ex) {
    err << "error: " << ex.what() << "\n";
    return 2;
  } catch (const ValidationError& ex) {
    err << "error: " << ex.what() << "\n";
    return 3;
  } catch (const ConfigError& ex) {
    err << "error: " << ex.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& ex) {
    err << "error: " << ex.what() << "\n";
    return 1;
  }
}

}  // namespace rmtde
