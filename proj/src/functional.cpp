#include "nehari/functional.h"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nehari {

namespace {

// Nodal right-hand side of one equation, written once for both components so
// that an exchange-symmetric state gives bitwise identical results.
Eigen::VectorXd nonlinear_terms(const Eigen::VectorXd& self, const Eigen::VectorXd& other, double mu,
                                double beta) {
  return (mu * self.array().cube() + beta * self.array() * other.array().square()).matrix();
}

Eigen::VectorXd gradient_component(const Field& self, const Field& other, double lambda, double mu, double beta,
                                   const Field& source) {
  const Field lap = laplacian_apply(self.grid, self);
  Eigen::VectorXd g = lap.values + lambda * self.values - nonlinear_terms(self.values, other.values, mu, beta) -
                      source.values;
  return g * self.grid.weight();
}

}  // namespace

double beta_lower_limit(double mu1, double mu2) { return -std::sqrt(mu1 * mu2); }

void Params::validate() const {
  auto positive = [](double x, const char* name) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      std::ostringstream msg;
      msg << name << " must be a positive finite number, got " << x;
      throw std::invalid_argument(msg.str());
    }
  };
  positive(lambda1, "lambda1");
  positive(lambda2, "lambda2");
  positive(mu1, "mu1");
  positive(mu2, "mu2");
  if (!std::isfinite(beta) || !(beta > beta_lower_limit(mu1, mu2))) {
    std::ostringstream msg;
    msg << "beta must exceed -sqrt(mu1*mu2) = " << beta_lower_limit(mu1, mu2) << ", got " << beta;
    throw std::invalid_argument(msg.str());
  }
  require_same_grid(f.grid, g.grid, "Params sources");
  if (f.grid.size() == 0) throw std::invalid_argument("sources are not defined on a grid");
  if (!f.all_finite() || !g.all_finite()) throw std::invalid_argument("sources must have finite values");
}

double h_norm_sq(const Pair& p, const Params& params) {
  return h_norm_sq(p, params.lambda1, params.lambda2);
}

double quartic_A(const Pair& p, const Params& params) {
  require_same_grid(p.grid(), params.grid(), "quartic_A");
  const auto u2 = p.u.values.array().square();
  const auto v2 = p.v.values.array().square();
  const double s = params.mu1 * u2.square().sum() + params.mu2 * v2.square().sum() +
                   2.0 * params.beta * (u2 * v2).sum();
  return s * p.grid().weight();
}

double source_B(const Pair& p, const Params& params) {
  require_same_grid(p.grid(), params.grid(), "source_B");
  return integrate_product(params.f, p.u) + integrate_product(params.g, p.v);
}

Functionals functionals(const Pair& p, const Params& params) {
  return {h_norm_sq(p, params), quartic_A(p, params), source_B(p, params)};
}

EnergyBreakdown energy(const Pair& p, const Params& params) {
  const Functionals fn = functionals(p, params);
  EnergyBreakdown e;
  e.quadratic = 0.5 * fn.norm_sq;
  e.quartic = 0.25 * fn.A;
  e.source = fn.B;
  e.total = e.quadratic - e.quartic - e.source;
  return e;
}

Pair gradient(const Pair& p, const Params& params) {
  require_same_grid(p.grid(), params.grid(), "gradient");
  Field gu(p.grid(), gradient_component(p.u, p.v, params.lambda1, params.mu1, params.beta, params.f));
  Field gv(p.grid(), gradient_component(p.v, p.u, params.lambda2, params.mu2, params.beta, params.g));
  return Pair(std::move(gu), std::move(gv));
}

double nehari_Phi(const Pair& p, const Params& params) {
  const Functionals fn = functionals(p, params);
  return fn.norm_sq - fn.A - fn.B;
}

double phi_prime_pairing(const Pair& p, const Params& params) {
  const Functionals fn = functionals(p, params);
  return 2.0 * fn.norm_sq - 4.0 * fn.A - fn.B;
}

Pair strong_residual(const Pair& p, const Params& params) {
  const double w = p.grid().weight();
  Pair g = gradient(p, params);
  return (1.0 / w) * g;
}

double scaled_pde_residual(const Pair& p, const Params& params) {
  const Pair r = strong_residual(p, params);
  double scale = 0.0;
  auto track = [&scale](const Eigen::VectorXd& term) {
    if (term.size() > 0) scale = std::max(scale, term.cwiseAbs().maxCoeff());
  };
  const auto component = [&](const Field& self, const Field& other, double lambda, double mu, const Field& src) {
    track(laplacian_apply(self.grid, self).values);
    track(lambda * self.values);
    track((mu * self.values.array().cube()).matrix());
    track((params.beta * self.values.array() * other.values.array().square()).matrix());
    track(src.values);
  };
  component(p.u, p.v, params.lambda1, params.mu1, params.f);
  component(p.v, p.u, params.lambda2, params.mu2, params.g);
  if (scale == 0.0) return 0.0;
  return max_abs(r) / scale;
}

}  // namespace nehari
