#include "nehari/threshold.h"

#include <algorithm>
#include <cmath>
#include <random>

namespace nehari {

namespace {

Field normalized(const Field& w, double lambda) { return (1.0 / std::sqrt(field_h_norm_sq(w, lambda))) * w; }

double sobolev_ratio(const Field& w, double lambda) {
  return std::pow(l4_norm4(w), 0.25) / std::sqrt(field_h_norm_sq(w, lambda));
}

struct AscentResult {
  double ratio;
  bool converged;
  int iterations;
};

AscentResult ascend(Field w, const ShiftedLaplacianSolver& solver, double lambda, const S4Options& options) {
  w = normalized(w, lambda);
  double ratio = sobolev_ratio(w, lambda);
  for (int k = 1; k <= options.max_iters; ++k) {
    Field cube(w.grid, w.values.array().cube().matrix());
    w = normalized(solver.solve(cube), lambda);
    const double next = sobolev_ratio(w, lambda);
    const bool settled = std::abs(next - ratio) <= options.tol * next;
    ratio = std::max(ratio, next);
    if (settled) return {ratio, true, k};
  }
  return {ratio, false, options.max_iters};
}

double log_ratio(const Functionals& fn) { return std::log(fn.B) + 0.5 * std::log(fn.A) - 1.5 * std::log(fn.norm_sq); }

}  // namespace

S4Estimate estimate_s4(const Grid& grid, double lambda, const S4Options& options) {
  if (!(lambda > 0.0)) throw std::invalid_argument("estimate_s4 needs lambda > 0");
  const ShiftedLaplacianSolver solver(grid, lambda);

  S4Estimate best;
  best.converged = true;
  auto absorb = [&best](const AscentResult& r) {
    best.value = std::max(best.value, r.ratio);
    best.converged = best.converged && r.converged;
    best.iterations += r.iterations;
  };

  absorb(ascend(first_eigenvector(grid), solver, lambda, options));

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int r = 0; r < options.restarts; ++r) {
    Field w(grid);
    for (Eigen::Index k = 0; k < w.values.size(); ++k) w.values[k] = normal(rng);
    absorb(ascend(w, solver, lambda, options));
  }
  return best;
}

double sup_A_coefficient(double mu1, double mu2, double beta) {
  // On the unit sphere with a = ||u||^2, b = ||v||^2, a + b = 1:
  // A <= s4^4 (mu1 a^2 + mu2 b^2 + 2 beta+ a b) <= c s4^4.
  const double c = std::max(mu1, mu2);
  return beta > 0.0 ? std::max(c, beta) : c;
}

ThresholdReport compute_threshold(const Params& params, double s4) {
  if (!(s4 > 0.0)) throw std::invalid_argument("compute_threshold needs s4 > 0");
  ThresholdReport r;
  r.s4 = s4;
  r.sup_A_bound = sup_A_coefficient(params.mu1, params.mu2, params.beta) * std::pow(s4, 4);
  r.alpha = (2.0 / 3.0) * std::sqrt(1.0 / (3.0 * r.sup_A_bound));
  r.lambda_threshold = r.alpha / (std::sqrt(2.0) * s4);
  r.f_norm = l43_norm(params.f);
  r.g_norm = l43_norm(params.g);
  r.degenerate_sources = params.f.values.isZero(0.0) || params.g.values.isZero(0.0);
  r.satisfied = !r.degenerate_sources && std::max(r.f_norm, r.g_norm) < r.lambda_threshold;
  return r;
}

bool check_B_bound(const Pair& p, const Params& params, const ThresholdReport& /*report*/) {
  const Functionals fn = functionals(p, params);
  if (std::abs(std::sqrt(fn.norm_sq) - 1.0) > 1e-10) {
    throw std::invalid_argument("check_B_bound expects a direction normalised to ||(u,v)|| = 1");
  }
  return fn.B < (2.0 / 3.0) * std::sqrt(1.0 / (3.0 * fn.A));
}

double tangency_ratio(const Pair& p, const Params& params) {
  const Functionals fn = functionals(p, params);
  const double psi_max = (2.0 / 3.0) * fn.norm_sq * std::sqrt(fn.norm_sq / (3.0 * fn.A));
  return fn.B / psi_max;
}

TangencySearch maximize_tangency_ratio(const Pair& start, const Params& params, int max_iters) {
  const Grid& grid = params.grid();
  const ShiftedLaplacianSolver solve_u(grid, params.lambda1);
  const ShiftedLaplacianSolver solve_v(grid, params.lambda2);
  const double w = grid.weight();

  auto unit = [&](const Pair& p) { return (1.0 / std::sqrt(h_norm_sq(p, params))) * p; };

  TangencySearch out;
  out.direction = unit(start);
  Functionals fn = functionals(out.direction, params);
  if (!(fn.B > 0.0)) {
    out.ratio = tangency_ratio(out.direction, params);
    return out;
  }
  double value = log_ratio(fn);
  double step = 0.1;

  for (int k = 0; k < max_iters; ++k) {
    out.iterations = k + 1;
    const Pair& p = out.direction;
    // Nodal gradient of log B + (1/2) log A - (3/2) log ||p||^2.
    const Eigen::VectorXd u = p.u.values;
    const Eigen::VectorXd v = p.v.values;
    const Eigen::VectorXd dA_u = 4.0 * w *
        (params.mu1 * u.array().cube() + params.beta * u.array() * v.array().square()).matrix();
    const Eigen::VectorXd dA_v = 4.0 * w *
        (params.mu2 * v.array().cube() + params.beta * v.array() * u.array().square()).matrix();
    const Eigen::VectorXd dN_u = 2.0 * w * (laplacian_apply(grid, p.u).values + params.lambda1 * u);
    const Eigen::VectorXd dN_v = 2.0 * w * (laplacian_apply(grid, p.v).values + params.lambda2 * v);
    const Eigen::VectorXd gu = w * params.f.values / fn.B + dA_u / (2.0 * fn.A) - 1.5 * dN_u / fn.norm_sq;
    const Eigen::VectorXd gv = w * params.g.values / fn.B + dA_v / (2.0 * fn.A) - 1.5 * dN_v / fn.norm_sq;
    const Pair dir(solve_u.solve(Field(grid, gu / w)), solve_v.solve(Field(grid, gv / w)));

    bool improved = false;
    while (step > 1e-14) {
      const Pair trial = unit(p + step * dir);
      const Functionals tf = functionals(trial, params);
      if (tf.B > 0.0 && log_ratio(tf) > value) {
        const double gain = log_ratio(tf) - value;
        out.direction = trial;
        fn = tf;
        value = log_ratio(tf);
        improved = gain > 1e-15;
        step = std::min(1.0, 2.0 * step);
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  out.ratio = tangency_ratio(out.direction, params);
  return out;
}

}  // namespace nehari
