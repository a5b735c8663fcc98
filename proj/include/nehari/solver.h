#pragma once

#include "nehari/fibering.h"
#include "nehari/threshold.h"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nehari {

struct SolverConfig {
  int max_iters = 50000;
  double grad_tol = 1e-8;     // max-norm of the nodal gradient
  double nehari_tol = 1e-10;  // |Phi| / ||p||^2
  double armijo_factor = 0.5;
  double armijo_slope = 1e-4;
  double initial_step = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// One accepted (retracted) iterate.
struct IterateRecord {
  double energy = 0.0;
  double norm = 0.0;
  double classification = 0.0;     // phi_prime_pairing
  double identity_residual = 0.0;  // |J - (||p||^2/4 - 3B/4)| / (1 + |J|)
  double energy_scale = 0.0;       // |quadratic| + |quartic| + |source|
};

struct SolveReport {
  Branch branch = Branch::Plus;
  Pair state;
  double theta = 0.0;
  EnergyBreakdown energy;
  double norm_sq = 0.0;
  double A = 0.0;
  double B = 0.0;
  double grad_norm = 0.0;
  double nehari_residual = 0.0;
  double classification_value = 0.0;
  double pde_residual = 0.0;
  bool positive_u = false;
  bool positive_v = false;
  int iterations = 0;
  bool converged = false;
  std::string status;  // "converged", "iteration cap", "line search stalled"
  double norm_min = 0.0;  // m: smallest ||p|| over the accepted iterates
  double norm_max = 0.0;  // M: largest ||p|| over the accepted iterates
  double tau_bound = 0.0;  // ||p||^2 / sqrt(3A); the N- branch requires ||p|| > tau_bound
  int noise_injections = 0;
  double grad_tol = 0.0;
  double nehari_tol = 0.0;
  std::vector<IterateRecord> history;
};

/// Loss of the targeted root during descent. Only possible when the source
/// smallness condition fails.
class BranchVanished : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A component collapsed to zero twice in one run.
class SemiTrivialCollapse : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Starting direction: N+ uses (f, g) normalised; N- uses the first
/// eigenvector on both components plus seeded noise of relative size 1e-3.
/// The same noise field goes into both components, so exchange-symmetric
/// problems get an exchange-symmetric start.
Pair auto_init(Branch branch, const Params& params, const Grid& grid, std::uint64_t seed);

/// Component-weighted variant of the N- start: (first eigenvector, weight *
/// first eigenvector), or swapped when `swap` is set.
Pair biased_init(const Grid& grid, double weight, bool swap);

/// Minimises the energy over one branch by retracted descent: step along the
/// negative Sobolev gradient (-Lap + lambda_i)^-1 J', rescale the trial back
/// onto the branch, accept by Armijo backtracking on J.
SolveReport minimize(Branch branch, const Params& params, const Grid& grid, const SolverConfig& cfg,
                     const std::optional<Pair>& init = std::nullopt);

/// Runs minimize from each start and keeps the lowest energy. `spread` is
/// max minus min over the converged candidates.
struct MultiStartResult {
  SolveReport best;
  std::vector<double> candidate_thetas;
  double spread = 0.0;
  bool disagree = false;  // spread beyond 1e-6 relative
};
MultiStartResult minimize_multistart(Branch branch, const Params& params, const Grid& grid, const SolverConfig& cfg,
                                     const std::vector<Pair>& starts);

/// Rebuilds the report fields from the state alone (fresh quadrature).
SolveReport make_report(Branch branch, const Pair& state, const Params& params, const SolverConfig& cfg);

/// Replaces (u, v) by (|u|, |v|), retracts onto the same branch and
/// minimises again from there. Requires f, g >= 0 and a converged report.
SolveReport positivity_rescale(const SolveReport& report, const Params& params, const SolverConfig& cfg);

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double limit = 0.0;
};

/// Independent re-evaluation of a report. Failures are listed, never thrown.
/// `s4` feeds the coercivity check; `seed` drives the random test pairs of
/// the weak-form check.
std::vector<CheckResult> verify_solution(const SolveReport& report, const Params& params, double s4,
                                         std::uint64_t seed = 0);

bool all_passed(const std::vector<CheckResult>& checks);

bool sources_nonnegative(const Params& params);

}  // namespace nehari
