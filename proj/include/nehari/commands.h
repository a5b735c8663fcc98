#pragma once

#include "nehari/config.h"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace nehari {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfigError = 2,
  kExitThresholdUnsatisfied = 3,
  kExitSolverFailure = 4,
  kExitVerificationFailure = 5,
};

/// Command-line overrides layered on top of a config file.
struct RunOptions {
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> rho;
  std::optional<double> beta;
  bool force = false;
  int jobs = 1;
};

/// Config with the overrides applied (does not validate).
ProblemConfig apply_overrides(ProblemConfig cfg, const RunOptions& opts);

/// Both branches of one problem plus their verification.
struct TwoBranchResult {
  SolveReport ground;
  SolveReport bound;
  std::vector<double> bound_candidates;  // theta of each N- start
  bool bound_candidates_disagree = false;
  std::vector<CheckResult> ground_checks;
  std::vector<CheckResult> bound_checks;
  std::vector<CheckResult> pair_checks;
};

/// Starts used for the N- branch: the seeded symmetric start plus the two
/// component-weighted starts.
std::vector<Pair> bound_state_starts(const Problem& pb, std::uint64_t seed);

/// Ground state from the source direction, bound state as the lowest of the
/// N- starts; positivity rescaling when f, g >= 0; verification.
/// Solver exceptions propagate.
TwoBranchResult solve_two_branches(const Problem& pb, const SolverConfig& cfg);

json checks_document(const TwoBranchResult& r);

/// Runs the full pipeline and writes threshold.json, ground_state.{json,csv},
/// bound_state.{json,csv} and checks.json into the output directory.
int cmd_solve(const ProblemConfig& cfg, const RunOptions& opts, std::ostream& log);

/// Prints the threshold report.
int cmd_threshold(const ProblemConfig& cfg, const RunOptions& opts, std::ostream& out, std::ostream& log);

/// Prints the fibering analysis of a direction: "source", "eigen" or
/// "csv:PATH" (pair CSV).
int cmd_fibering(const ProblemConfig& cfg, const RunOptions& opts, const std::string& direction, std::ostream& out,
                 std::ostream& log);

/// Fibering analysis of a raw (norm_sq, A, B) triple.
int cmd_fibering_triple(double norm_sq, double A, double B, std::ostream& out, std::ostream& log);

/// One solve per value of `parameter` ("beta" or "rho"), run_<k>/ per value,
/// sweep.csv in the output directory.
int cmd_sweep(const ProblemConfig& cfg, const RunOptions& opts, const std::string& parameter,
              const std::vector<double>& values, std::ostream& log);

/// Re-verifies saved ground/bound states in the output directory.
int cmd_check(const ProblemConfig& cfg, const RunOptions& opts, std::ostream& out, std::ostream& log);

}  // namespace nehari
