#include "rmtde/experiments.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

int main(int argc, char** argv) {
  CLI::App app{"deterministic equivalents for correlated MIMO multiple-access channels"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool bits = false;

  for (const char* name :
       {"solve", "sweep-snr", "variance-vs-cv", "optimize-covariance", "validate"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "experiment config (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory for CSV files");
    sub->add_option("--seed", seed, "override the config master seed");
    sub->add_option("--threads", threads, "worker threads for Monte-Carlo ensembles");
    sub->add_flag("--bits", bits, "report rates in bits instead of nats");
  }

  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  return rmtde::run_command(command, config_path, out_dir, seed, threads, bits, std::cout,
                            std::cerr);
}
