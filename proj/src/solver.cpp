#include "nehari/solver.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace nehari {

namespace {

constexpr double kMinStep = 1e-14;
constexpr double kCollapseLevel = 1e-8;
constexpr double kInjectionSize = 1e-4;

// Descent direction in the metric of the H norm: component i solves
// (-Lap + lambda_i) d_i = G_i / h^dim.
class SobolevPreconditioner {
public:
  SobolevPreconditioner(const Grid& grid, const Params& params)
      : u_(grid, params.lambda1), v_(grid, params.lambda2), weight_(grid.weight()) {}

  Pair apply(const Pair& g) const {
    return Pair(u_.solve((1.0 / weight_) * g.u), v_.solve((1.0 / weight_) * g.v));
  }

private:
  ShiftedLaplacianSolver u_;
  ShiftedLaplacianSolver v_;
  double weight_;
};

double energy_scale(const EnergyBreakdown& e) {
  return std::abs(e.quadratic) + std::abs(e.quartic) + std::abs(e.source);
}

double identity_residual(const EnergyBreakdown& e) {
  // On the manifold J = ||p||^2 / 4 - 3 B / 4.
  const double predicted = 0.5 * e.quadratic - 0.75 * e.source;
  return std::abs(e.total - predicted) / (1.0 + std::abs(e.total));
}

bool component_positive(const Field& w) {
  if (w.values.size() == 0) return false;
  const double hi = w.values.maxCoeff();
  const double lo = w.values.minCoeff();
  return hi > 0.0 && lo >= -1e-10 * hi;
}

bool sign_matches(Branch b, double classification) {
  return b == Branch::Plus ? classification > 0.0 : classification < 0.0;
}

Field seeded_noise(const Grid& grid, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Field out(grid);
  for (Eigen::Index k = 0; k < out.values.size(); ++k) out.values[k] = normal(rng);
  return out;
}

IterateRecord record_of(const Pair& p, const Params& params, const EnergyBreakdown& e) {
  IterateRecord r;
  r.energy = e.total;
  r.norm = std::sqrt(2.0 * e.quadratic);
  r.classification = phi_prime_pairing(p, params);
  r.identity_residual = identity_residual(e);
  r.energy_scale = energy_scale(e);
  return r;
}

}  // namespace

void SolverConfig::validate() const {
  if (max_iters < 0) throw std::invalid_argument("max_iters must be nonnegative");
  if (!(grad_tol > 0.0)) throw std::invalid_argument("grad_tol must be positive");
  if (!(nehari_tol > 0.0)) throw std::invalid_argument("nehari_tol must be positive");
  if (!(armijo_factor > 0.0 && armijo_factor < 1.0)) throw std::invalid_argument("armijo_factor must lie in (0,1)");
  if (!(armijo_slope > 0.0 && armijo_slope < 1.0)) throw std::invalid_argument("armijo_slope must lie in (0,1)");
  if (!(initial_step > 0.0)) throw std::invalid_argument("initial_step must be positive");
}

bool sources_nonnegative(const Params& params) {
  return params.f.values.minCoeff() >= 0.0 && params.g.values.minCoeff() >= 0.0;
}

Pair auto_init(Branch branch, const Params& params, const Grid& grid, std::uint64_t seed) {
  require_same_grid(grid, params.grid(), "auto_init");
  if (branch == Branch::Plus) {
    const Pair dir(params.f, params.g);
    if (dir.is_zero()) {
      throw std::invalid_argument("N+ start needs nonzero sources: with f = g = 0 no direction has B > 0");
    }
    return (1.0 / std::sqrt(h_norm_sq(dir, params))) * dir;
  }
  std::mt19937_64 rng(seed);
  const Field phi = first_eigenvector(grid);
  Field noise = seeded_noise(grid, rng);
  noise = (1e-3 * phi.values.cwiseAbs().maxCoeff() / noise.values.cwiseAbs().maxCoeff()) * noise;
  const Field w = phi + noise;
  const Pair dir(w, w);
  return (1.0 / std::sqrt(h_norm_sq(dir, params))) * dir;
}

Pair biased_init(const Grid& grid, double weight, bool swap) {
  const Field phi = first_eigenvector(grid);
  return swap ? Pair(weight * phi, phi) : Pair(phi, weight * phi);
}

SolveReport make_report(Branch branch, const Pair& state, const Params& params, const SolverConfig& cfg) {
  SolveReport r;
  r.branch = branch;
  r.state = state;
  r.energy = energy(state, params);
  r.theta = r.energy.total;
  const Functionals fn = functionals(state, params);
  r.norm_sq = fn.norm_sq;
  r.A = fn.A;
  r.B = fn.B;
  r.grad_norm = max_abs(gradient(state, params));
  const double phi = fn.norm_sq - fn.A - fn.B;
  r.nehari_residual = fn.norm_sq > 0.0 ? std::abs(phi) / fn.norm_sq : std::numeric_limits<double>::infinity();
  r.classification_value = 2.0 * fn.norm_sq - 4.0 * fn.A - fn.B;
  r.pde_residual = scaled_pde_residual(state, params);
  r.positive_u = component_positive(state.u);
  r.positive_v = component_positive(state.v);
  r.tau_bound = fn.A > 0.0 ? fn.norm_sq / std::sqrt(3.0 * fn.A) : std::numeric_limits<double>::infinity();
  r.norm_min = r.norm_max = std::sqrt(fn.norm_sq);
  r.grad_tol = cfg.grad_tol;
  r.nehari_tol = cfg.nehari_tol;
  r.converged = r.grad_norm <= cfg.grad_tol && r.nehari_residual <= cfg.nehari_tol &&
                sign_matches(branch, r.classification_value);
  r.status = r.converged ? "converged" : "not converged";
  return r;
}

SolveReport minimize(Branch branch, const Params& params, const Grid& grid, const SolverConfig& cfg,
                     const std::optional<Pair>& init) {
  cfg.validate();
  params.validate();
  require_same_grid(grid, params.grid(), "minimize");

  const SobolevPreconditioner precond(grid, params);
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);

  Pair p = retract(init ? *init : auto_init(branch, params, grid, cfg.seed), params, branch);
  EnergyBreakdown e = energy(p, params);
  std::vector<IterateRecord> history{record_of(p, params, e)};
  int injections = 0;
  int iterations = 0;
  std::string status = "iteration cap";
  bool converged = false;

  for (;; ++iterations) {
    const Pair g = gradient(p, params);
    const double grad_norm = max_abs(g);
    const double nehari_residual = std::abs(nehari_Phi(p, params)) / (2.0 * e.quadratic);
    if (grad_norm <= cfg.grad_tol && nehari_residual <= cfg.nehari_tol) {
      converged = true;
      status = "converged";
      break;
    }
    if (iterations >= cfg.max_iters) break;

    const Pair d = precond.apply(g);
    const double slope = dot(g, d);
    // Energy differences below this are rounding noise in J.
    const double slack = 1e-13 * energy_scale(e);

    double step = cfg.initial_step;
    bool accepted = false;
    bool any_root = false;
    Pair next;
    EnergyBreakdown next_e;
    while (step >= kMinStep) {
      const Pair trial = p - step * d;
      if (!trial.is_zero()) {
        if (auto on_branch = try_retract(trial, params, branch)) {
          any_root = true;
          next_e = energy(*on_branch, params);
          if (next_e.total <= e.total - cfg.armijo_slope * step * slope + slack) {
            next = std::move(*on_branch);
            accepted = true;
            break;
          }
        }
      }
      step *= cfg.armijo_factor;
    }
    if (!accepted) {
      if (!any_root) {
        throw BranchVanished(std::string("descent lost the ") + to_string(branch) +
                             " root at iteration " + std::to_string(iterations) +
                             "; the source smallness condition is probably violated");
      }
      status = "line search stalled";
      break;
    }
    p = std::move(next);
    e = next_e;

    const double total = 2.0 * e.quadratic;
    const bool u_gone = field_h_norm_sq(p.u, params.lambda1) < kCollapseLevel * kCollapseLevel * total;
    const bool v_gone = field_h_norm_sq(p.v, params.lambda2) < kCollapseLevel * kCollapseLevel * total;
    if (u_gone || v_gone) {
      if (injections > 0) {
        throw SemiTrivialCollapse(std::string("component ") + (u_gone ? "u" : "v") +
                                  " collapsed again after noise injection");
      }
      ++injections;
      const double size = kInjectionSize * std::sqrt(total);
      Field nu = seeded_noise(grid, rng);
      Field nv = seeded_noise(grid, rng);
      nu = (size / std::sqrt(field_h_norm_sq(nu, params.lambda1))) * nu;
      nv = (size / std::sqrt(field_h_norm_sq(nv, params.lambda2))) * nv;
      Pair kicked(u_gone ? p.u + nu : p.u, v_gone ? p.v + nv : p.v);
      p = retract(kicked, params, branch);
      e = energy(p, params);
    }
    history.push_back(record_of(p, params, e));
  }

  SolveReport r = make_report(branch, p, params, cfg);
  r.iterations = iterations;
  r.noise_injections = injections;
  r.converged = converged && sign_matches(branch, r.classification_value);
  r.status = status;
  r.norm_min = r.norm_max = history.front().norm;
  for (const auto& h : history) {
    r.norm_min = std::min(r.norm_min, h.norm);
    r.norm_max = std::max(r.norm_max, h.norm);
  }
  r.history = std::move(history);
  return r;
}

MultiStartResult minimize_multistart(Branch branch, const Params& params, const Grid& grid, const SolverConfig& cfg,
                                     const std::vector<Pair>& starts) {
  if (starts.empty()) throw std::invalid_argument("minimize_multistart needs at least one start");
  MultiStartResult out;
  std::optional<SolveReport> best;
  std::string last_error;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& start : starts) {
    SolveReport r;
    try {
      r = minimize(branch, params, grid, cfg, start);
    } catch (const NoSuchBranch& e) {
      last_error = e.what();
      continue;
    }
    out.candidate_thetas.push_back(r.theta);
    if (r.converged) {
      lo = std::min(lo, r.theta);
      hi = std::max(hi, r.theta);
    }
    const bool better = !best || (r.converged && !best->converged) ||
                        (r.converged == best->converged && r.theta < best->theta);
    if (better) best = std::move(r);
  }
  if (!best) throw NoSuchBranch(branch, 0.0, 0.0, 0.0, 0.0);
  out.best = std::move(*best);
  out.spread = hi >= lo ? hi - lo : 0.0;
  out.disagree = out.spread > 1e-6 * std::max(1.0, std::abs(out.best.theta));
  return out;
}

SolveReport positivity_rescale(const SolveReport& report, const Params& params, const SolverConfig& cfg) {
  if (!sources_nonnegative(params)) {
    throw std::invalid_argument("positivity_rescale requires nonnegative sources f, g");
  }
  if (!report.converged) throw std::invalid_argument("positivity_rescale requires a converged report");
  const Pair magnitude(Field(report.state.grid(), report.state.u.values.cwiseAbs()),
                       Field(report.state.grid(), report.state.v.values.cwiseAbs()));
  const Pair start = retract(magnitude, params, report.branch);
  SolveReport out = minimize(report.branch, params, report.state.grid(), cfg, start);
  out.iterations += report.iterations;
  return out;
}

std::vector<CheckResult> verify_solution(const SolveReport& report, const Params& params, double s4,
                                         std::uint64_t seed) {
  std::vector<CheckResult> out;
  auto add = [&out](std::string name, bool passed, double value, double limit) {
    out.push_back({std::move(name), passed, value, limit});
  };

  const Pair& p = report.state;
  const Functionals fn = functionals(p, params);
  const EnergyBreakdown e = energy(p, params);
  const double norm = std::sqrt(fn.norm_sq);
  const double phi = fn.norm_sq - fn.A - fn.B;
  const double classification = 2.0 * fn.norm_sq - 4.0 * fn.A - fn.B;
  const Pair g = gradient(p, params);

  add("converged", report.converged, report.converged ? 1.0 : 0.0, 1.0);

  const double grad_norm = max_abs(g);
  add("gradient_norm", grad_norm <= report.grad_tol, grad_norm, report.grad_tol);

  const double nehari = fn.norm_sq > 0.0 ? std::abs(phi) / fn.norm_sq : std::numeric_limits<double>::infinity();
  add("nehari_residual", nehari <= report.nehari_tol, nehari, report.nehari_tol);

  add("branch_sign", sign_matches(report.branch, classification), classification, 0.0);

  const double theta_gap = std::abs(report.theta - e.total);
  add("theta_consistent", theta_gap <= 1e-10 * (1.0 + std::abs(e.total)), theta_gap,
      1e-10 * (1.0 + std::abs(e.total)));

  if (report.branch == Branch::Plus) {
    add("ground_energy_negative", e.total < 0.0, e.total, 0.0);
    add("branch_norm_bound", fn.norm_sq > 3.0 * fn.A, fn.norm_sq - 3.0 * fn.A, 0.0);
  } else {
    add("bound_energy_positive_if_B_nonpositive", fn.B > 0.0 || e.total > 0.0, e.total, 0.0);
    const double tau = fn.A > 0.0 ? fn.norm_sq / std::sqrt(3.0 * fn.A) : std::numeric_limits<double>::infinity();
    add("branch_norm_bound", norm > tau, norm - tau, 0.0);
  }

  const double m = report.norm_min;
  const double big_m = report.norm_max;
  add("norm_bounds", m > 0.0 && m <= norm * (1.0 + 1e-12) && norm <= big_m * (1.0 + 1e-12), m, big_m);

  const double u_norm = std::sqrt(field_h_norm_sq(p.u, params.lambda1));
  const double v_norm = std::sqrt(field_h_norm_sq(p.v, params.lambda2));
  add("nontrivial_u", u_norm > 1e-6 * norm, u_norm, 1e-6 * norm);
  add("nontrivial_v", v_norm > 1e-6 * norm, v_norm, 1e-6 * norm);

  const double identity = identity_residual(e);
  add("energy_identity", identity <= 1e-8, identity, 1e-8);

  const double source_size = std::max(l43_norm(params.f), l43_norm(params.g));
  const double lower = 0.25 * fn.norm_sq - 0.75 * std::sqrt(2.0) * s4 * source_size * norm;
  const double coercive_slack = 1e-12 * energy_scale(e);
  add("coercivity_bound", e.total >= lower - coercive_slack, e.total - lower, 0.0);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  double weak = 0.0;
  for (int k = 0; k < 20; ++k) {
    Pair q = Pair::zeros(p.grid());
    for (Eigen::Index i = 0; i < q.u.values.size(); ++i) q.u.values[i] = normal(rng);
    for (Eigen::Index i = 0; i < q.v.values.size(); ++i) q.v.values[i] = normal(rng);
    const double pairing = std::abs(dot(g, q));
    weak = std::max(weak, pairing / (std::sqrt(h_norm_sq(q, params)) * std::max(1.0, norm)));
  }
  add("weak_form_residual", weak <= 1e-6, weak, 1e-6);

  const double pde = scaled_pde_residual(p, params);
  add("pde_residual", pde <= 1e-6, pde, 1e-6);

  if (sources_nonnegative(params)) {
    const bool pos = component_positive(p.u) && component_positive(p.v);
    add("positive_components", pos, pos ? 1.0 : 0.0, 1.0);
  }
  return out;
}

bool all_passed(const std::vector<CheckResult>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

}  // namespace nehari
