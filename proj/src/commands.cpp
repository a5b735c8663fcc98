#include "nehari/commands.h"

#include <atomic>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>

namespace nehari {

namespace {

constexpr double kBiasWeight = 0.1;

struct PipelineResult {
  int exit_code = kExitOk;
  std::optional<ThresholdReport> threshold;
  std::optional<TwoBranchResult> branches;
};

json threshold_document(const Problem& pb) {
  json j = to_json(pb.threshold);
  j["s4_converged"] = pb.s4.converged;
  j["s4_iterations"] = pb.s4.iterations;
  j["source_scale"] = pb.source_scale;
  return j;
}

std::filesystem::path output_dir(const ProblemConfig& cfg, const RunOptions& opts) {
  return opts.out_dir ? *opts.out_dir : cfg.output;
}

// Shared by solve and sweep so that a one-value sweep reproduces solve.
PipelineResult run_pipeline(const ProblemConfig& cfg, const std::filesystem::path& out, bool force, std::ostream& log) {
  PipelineResult res;
  Problem pb;
  try {
    validate_config(cfg, force);
    pb = build_problem(cfg);
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << '\n';
    res.exit_code = kExitConfigError;
    return res;
  }
  res.threshold = pb.threshold;

  std::filesystem::create_directories(out);
  write_json_file(out / "threshold.json", threshold_document(pb));
  if (!pb.s4.converged) log << "warning: S4 ascent hit its iteration cap; using the best value found\n";

  if (pb.threshold.degenerate_sources && !force) {
    log << "error: hypothesis violated: the sources f and g must be both nonzero\n";
    res.exit_code = kExitThresholdUnsatisfied;
    return res;
  }
  if (!pb.threshold.satisfied && !force) {
    log << "error: max(|f|_4/3, |g|_4/3) = " << std::max(pb.threshold.f_norm, pb.threshold.g_norm)
        << " is not below Lambda = " << pb.threshold.lambda_threshold << " (use --force to run anyway)\n";
    res.exit_code = kExitThresholdUnsatisfied;
    return res;
  }

  TwoBranchResult r;
  try {
    r = solve_two_branches(pb, cfg.solver);
  } catch (const std::exception& e) {
    log << "error: solver failed: " << e.what() << '\n';
    write_json_file(out / "checks.json", json{{"error", e.what()}, {"all_passed", false}});
    res.exit_code = kExitSolverFailure;
    return res;
  }

  write_json_file(out / "ground_state.json", to_json(r.ground));
  write_pair_csv_file(out / "ground_state.csv", r.ground.state);
  json bound = to_json(r.bound);
  json candidates = json::array();
  for (double t : r.bound_candidates) candidates.push_back(t);
  bound["candidate_thetas"] = candidates;
  bound["candidates_disagree"] = r.bound_candidates_disagree;
  write_json_file(out / "bound_state.json", bound);
  write_pair_csv_file(out / "bound_state.csv", r.bound.state);
  const json doc = checks_document(r);
  write_json_file(out / "checks.json", doc);

  if (!r.ground.converged || !r.bound.converged) {
    log << "error: solver did not converge (" << r.ground.status << " / " << r.bound.status << ")\n";
    res.exit_code = kExitSolverFailure;
  } else if (!doc.at("all_passed").get<bool>()) {
    log << "error: verification failed, see checks.json\n";
    res.exit_code = kExitVerificationFailure;
  }
  res.branches = std::move(r);
  return res;
}

std::string csv_number(std::optional<double> x) {
  return x ? format_double(*x) : std::string("nan");
}

}  // namespace

ProblemConfig apply_overrides(ProblemConfig cfg, const RunOptions& opts) {
  if (opts.seed) {
    cfg.solver.seed = *opts.seed;
    cfg.s4.seed = *opts.seed;
  }
  if (opts.rho) cfg.rho = *opts.rho;
  if (opts.beta) cfg.beta = *opts.beta;
  if (opts.out_dir) cfg.output = *opts.out_dir;
  return cfg;
}

std::vector<Pair> bound_state_starts(const Problem& pb, std::uint64_t seed) {
  return {auto_init(Branch::Minus, pb.params, pb.grid, seed), biased_init(pb.grid, kBiasWeight, false),
          biased_init(pb.grid, kBiasWeight, true)};
}

TwoBranchResult solve_two_branches(const Problem& pb, const SolverConfig& cfg) {
  TwoBranchResult r;
  r.ground = minimize(Branch::Plus, pb.params, pb.grid, cfg);
  const MultiStartResult ms = minimize_multistart(Branch::Minus, pb.params, pb.grid, cfg, bound_state_starts(pb, cfg.seed));
  r.bound = ms.best;
  r.bound_candidates = ms.candidate_thetas;
  r.bound_candidates_disagree = ms.disagree;

  if (sources_nonnegative(pb.params)) {
    if (r.ground.converged) r.ground = positivity_rescale(r.ground, pb.params, cfg);
    if (r.bound.converged) r.bound = positivity_rescale(r.bound, pb.params, cfg);
  }

  r.ground_checks = verify_solution(r.ground, pb.params, pb.s4.value, cfg.seed);
  r.bound_checks = verify_solution(r.bound, pb.params, pb.s4.value, cfg.seed + 1);
  r.pair_checks.push_back({"theta_plus_below_theta_minus", r.ground.theta < r.bound.theta,
                           r.ground.theta - r.bound.theta, 0.0});
  return r;
}

json checks_document(const TwoBranchResult& r) {
  const bool ok = all_passed(r.ground_checks) && all_passed(r.bound_checks) && all_passed(r.pair_checks);
  return {{"ground_state", to_json(r.ground_checks)},
          {"bound_state", to_json(r.bound_checks)},
          {"pair", to_json(r.pair_checks)},
          {"theta_plus", r.ground.theta},
          {"theta_minus", r.bound.theta},
          {"all_passed", ok}};
}

int cmd_solve(const ProblemConfig& cfg, const RunOptions& opts, std::ostream& log) {
  const ProblemConfig c = apply_overrides(cfg, opts);
  const PipelineResult res = run_pipeline(c, output_dir(c, opts), opts.force, log);
  if (res.branches) {
    log << "theta+ = " << format_double(res.branches->ground.theta)
        << ", theta- = " << format_double(res.branches->bound.theta) << '\n';
  }
  return res.exit_code;
}

int cmd_threshold(const ProblemConfig& cfg, const RunOptions& opts, std::ostream& out, std::ostream& log) {
  const ProblemConfig c = apply_overrides(cfg, opts);
  try {
    validate_config(c, opts.force);
    const Problem pb = build_problem(c);
    write_json(out, threshold_document(pb));
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
  return kExitOk;
}

int cmd_fibering(const ProblemConfig& cfg, const RunOptions& opts, const std::string& direction, std::ostream& out,
                 std::ostream& log) {
  const ProblemConfig c = apply_overrides(cfg, opts);
  try {
    validate_config(c, opts.force);
    const Problem pb = build_problem(c);
    Pair dir;
    if (direction == "source") {
      dir = Pair(pb.params.f, pb.params.g);
    } else if (direction == "eigen") {
      const Field phi = first_eigenvector(pb.grid);
      dir = Pair(phi, phi);
    } else if (direction.rfind("csv:", 0) == 0) {
      dir = read_pair_csv_file(direction.substr(4), pb.grid);
    } else {
      log << "error: unknown direction '" << direction << "' (expected source, eigen or csv:PATH)\n";
      return kExitConfigError;
    }
    write_json(out, to_json(analyze_direction(dir, pb.params)));
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
  return kExitOk;
}

int cmd_fibering_triple(double norm_sq, double A, double B, std::ostream& out, std::ostream& log) {
  try {
    write_json(out, to_json(analyze(norm_sq, A, B)));
  } catch (const std::invalid_argument& e) {
    log << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
  return kExitOk;
}

int cmd_sweep(const ProblemConfig& cfg, const RunOptions& opts, const std::string& parameter,
              const std::vector<double>& values, std::ostream& log) {
  if (parameter != "beta" && parameter != "rho") {
    log << "error: sweep parameter must be beta or rho, got '" << parameter << "'\n";
    return kExitConfigError;
  }
  if (values.empty()) {
    log << "error: sweep needs at least one value\n";
    return kExitConfigError;
  }
  const ProblemConfig base = apply_overrides(cfg, opts);
  std::vector<ProblemConfig> runs;
  for (double v : values) {
    ProblemConfig c = base;
    if (parameter == "beta") c.beta = v;
    else c.rho = v;
    try {
      validate_config(c, opts.force);
    } catch (const ConfigError& e) {
      log << "error: sweep value " << format_double(v) << ": " << e.what() << '\n';
      return kExitConfigError;
    }
    runs.push_back(std::move(c));
  }

  const std::filesystem::path out = output_dir(base, opts);
  std::filesystem::create_directories(out);
  std::vector<PipelineResult> results(runs.size());
  std::vector<std::string> logs(runs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < runs.size(); k = next++) {
      std::ostringstream run_log;
      results[k] = run_pipeline(runs[k], out / ("run_" + std::to_string(k)), opts.force, run_log);
      logs[k] = run_log.str();
    }
  };
  const int jobs = std::max(1, std::min<int>(opts.jobs, static_cast<int>(runs.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::ofstream csv(out / "sweep.csv");
  csv << "value,lambda_threshold,satisfied,exit_code,theta_plus,theta_minus,converged_plus,converged_minus,"
         "positive_plus,positive_minus\n";
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const auto& r = results[k];
    if (!logs[k].empty()) log << "[run " << k << "] " << logs[k];
    std::optional<double> lam, tp, tm;
    if (r.threshold) lam = r.threshold->lambda_threshold;
    if (r.branches) {
      tp = r.branches->ground.theta;
      tm = r.branches->bound.theta;
    }
    auto flag = [&](auto pick) { return r.branches ? (pick(*r.branches) ? "1" : "0") : "0"; };
    csv << format_double(values[k]) << ',' << csv_number(lam) << ',' << (r.threshold && r.threshold->satisfied ? 1 : 0)
        << ',' << r.exit_code << ',' << csv_number(tp) << ',' << csv_number(tm) << ','
        << flag([](const TwoBranchResult& b) { return b.ground.converged; }) << ','
        << flag([](const TwoBranchResult& b) { return b.bound.converged; }) << ','
        << flag([](const TwoBranchResult& b) { return b.ground.positive_u && b.ground.positive_v; }) << ','
        << flag([](const TwoBranchResult& b) { return b.bound.positive_u && b.bound.positive_v; }) << '\n';
  }
  return kExitOk;
}

int cmd_check(const ProblemConfig& cfg, const RunOptions& opts, std::ostream& out, std::ostream& log) {
  const ProblemConfig c = apply_overrides(cfg, opts);
  const std::filesystem::path dir = output_dir(c, opts);
  TwoBranchResult r;
  Problem pb;
  try {
    validate_config(c, opts.force);
    pb = build_problem(c);
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
  try {
    auto load = [&](const char* stem, Branch b) {
      const json meta = read_json_file(dir / (std::string(stem) + ".json"));
      const Pair state = read_pair_csv_file(dir / (std::string(stem) + ".csv"), pb.grid);
      SolveReport rep = make_report(b, state, pb.params, c.solver);
      rep.converged = meta.at("converged").get<bool>();
      rep.iterations = meta.at("iterations").get<int>();
      rep.norm_min = meta.at("norm_min").get<double>();
      rep.norm_max = meta.at("norm_max").get<double>();
      return rep;
    };
    r.ground = load("ground_state", Branch::Plus);
    r.bound = load("bound_state", Branch::Minus);
  } catch (const std::exception& e) {
    log << "error: cannot load saved states from " << dir.string() << ": " << e.what() << '\n';
    return kExitConfigError;
  }
  r.ground_checks = verify_solution(r.ground, pb.params, pb.s4.value, c.solver.seed);
  r.bound_checks = verify_solution(r.bound, pb.params, pb.s4.value, c.solver.seed + 1);
  r.pair_checks.push_back({"theta_plus_below_theta_minus", r.ground.theta < r.bound.theta,
                           r.ground.theta - r.bound.theta, 0.0});
  const json doc = checks_document(r);
  write_json(out, doc);
  return doc.at("all_passed").get<bool>() ? kExitOk : kExitVerificationFailure;
}

}  // namespace nehari
