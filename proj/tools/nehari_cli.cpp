// Command-line front end for the two-branch Nehari solver.
//
//   nehari solve     --config problem.json [--out DIR] [--seed N] [--rho X] [--beta X] [--force]
//   nehari threshold --config problem.json
//   nehari fibering  --config problem.json --direction source|eigen|csv:PATH
//   nehari fibering  --triple NORM_SQ A B
//   nehari sweep     --config problem.json --param beta|rho --values 0.1,0.5 [--jobs N]
//   nehari check     --config problem.json [--out DIR]

#include "nehari/commands.h"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

namespace {

struct CommonFlags {
  std::string config;
  std::string out;
  long long seed = -1;
  int jobs = 1;
  bool force = false;
  double rho = 0.0;
  double beta = 0.0;
  CLI::Option* rho_opt = nullptr;
  CLI::Option* beta_opt = nullptr;
};

void add_common(CLI::App* app, CommonFlags& f, bool needs_config) {
  auto* c = app->add_option("--config", f.config, "problem configuration (JSON)");
  if (needs_config) c->required();
  app->add_option("--out", f.out, "output directory (overrides the config)");
  app->add_option("--seed", f.seed, "random seed for S4 restarts and solver starts")->check(CLI::NonNegativeNumber);
  app->add_option("--jobs", f.jobs, "concurrent runs for sweep")->check(CLI::PositiveNumber);
  app->add_flag("--force", f.force, "run even when the source smallness condition fails");
  f.rho_opt = app->add_option("--rho", f.rho, "autoscale sources to rho * Lambda");
  f.beta_opt = app->add_option("--beta", f.beta, "override the coupling coefficient beta");
}

nehari::RunOptions to_options(const CommonFlags& f) {
  nehari::RunOptions o;
  if (!f.out.empty()) o.out_dir = f.out;
  if (f.seed >= 0) o.seed = static_cast<std::uint64_t>(f.seed);
  if (f.rho_opt && f.rho_opt->count() > 0) o.rho = f.rho;
  if (f.beta_opt && f.beta_opt->count() > 0) o.beta = f.beta;
  o.force = f.force;
  o.jobs = f.jobs;
  return o;
}

std::vector<double> parse_values(const std::string& list) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad number '" + item + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ground and bound states of a perturbed coupled cubic Schroedinger system"};
  app.require_subcommand(1);

  CommonFlags solve_flags, threshold_flags, fibering_flags, sweep_flags, check_flags;
  auto* solve = app.add_subcommand("solve", "solve both branches and verify the solutions");
  add_common(solve, solve_flags, true);

  auto* threshold = app.add_subcommand("threshold", "print the source threshold report");
  add_common(threshold, threshold_flags, true);

  auto* fibering = app.add_subcommand("fibering", "print the fibering analysis of a direction");
  add_common(fibering, fibering_flags, false);
  std::string direction = "source";
  std::vector<double> triple;
  fibering->add_option("--direction", direction, "source, eigen or csv:PATH");
  auto* triple_opt = fibering->add_option("--triple", triple, "analyse a raw (norm_sq, A, B) triple")->expected(3);

  auto* sweep = app.add_subcommand("sweep", "one solve per parameter value");
  add_common(sweep, sweep_flags, true);
  std::string parameter;
  std::string values;
  sweep->add_option("--param", parameter, "beta or rho")->required();
  sweep->add_option("--values", values, "comma-separated list")->required();

  auto* check = app.add_subcommand("check", "re-verify saved solutions");
  add_common(check, check_flags, true);

  CLI11_PARSE(app, argc, argv);

  auto load = [](const std::string& path) { return nehari::load_config(path); };
  try {
    if (*solve) return nehari::cmd_solve(load(solve_flags.config), to_options(solve_flags), std::cerr);
    if (*threshold) {
      return nehari::cmd_threshold(load(threshold_flags.config), to_options(threshold_flags), std::cout, std::cerr);
    }
    if (*fibering) {
      if (triple_opt->count() > 0) return nehari::cmd_fibering_triple(triple[0], triple[1], triple[2], std::cout, std::cerr);
      if (fibering_flags.config.empty()) {
        std::cerr << "error: fibering needs --config (or --triple)\n";
        return nehari::kExitConfigError;
      }
      return nehari::cmd_fibering(load(fibering_flags.config), to_options(fibering_flags), direction, std::cout,
                                  std::cerr);
    }
    if (*sweep) {
      std::vector<double> list;
      try {
        list = parse_values(values);
      } catch (const std::exception& e) {
        std::cerr << "error: --values: " << e.what() << '\n';
        return nehari::kExitConfigError;
      }
      return nehari::cmd_sweep(load(sweep_flags.config), to_options(sweep_flags), parameter, list, std::cerr);
    }
    if (*check) return nehari::cmd_check(load(check_flags.config), to_options(check_flags), std::cout, std::cerr);
  } catch (const nehari::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return nehari::kExitConfigError;
  }
  return nehari::kExitConfigError;
}
