#pragma once

#include "nehari/grid.h"

namespace nehari {

/// Coefficients and sources of
///   -Lap u + l1 u = m1 u^3 + b u v^2 + f,
///   -Lap v + l2 v = m2 v^3 + b u^2 v + g,   u = v = 0 on the boundary.
struct Params {
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double mu1 = 1.0;
  double mu2 = 1.0;
  double beta = 0.0;
  Field f;
  Field g;

  const Grid& grid() const { return f.grid; }

  /// Throws std::invalid_argument unless lambda_i, mu_i > 0,
  /// beta > -sqrt(mu1 mu2), and f, g share a grid with finite values.
  void validate() const;
};

/// Lower admissible limit for beta: -sqrt(mu1 mu2).
double beta_lower_limit(double mu1, double mu2);

struct EnergyBreakdown {
  double quadratic = 0.0;  // ||(u,v)||^2 / 2
  double quartic = 0.0;    // A / 4
  double source = 0.0;     // B
  double total = 0.0;      // quadratic - quartic - source
};

/// The three scalar building blocks of the energy along a direction.
struct Functionals {
  double norm_sq = 0.0;
  double A = 0.0;
  double B = 0.0;
};

double h_norm_sq(const Pair& p, const Params& params);

/// A(u,v) = mu1 |u|_4^4 + mu2 |v|_4^4 + 2 beta int u^2 v^2.
double quartic_A(const Pair& p, const Params& params);

/// B(u,v) = int (f u + g v).
double source_B(const Pair& p, const Params& params);

Functionals functionals(const Pair& p, const Params& params);

EnergyBreakdown energy(const Pair& p, const Params& params);

/// Nodal representative of J'(u,v): component u is
/// (-Lap u + l1 u - m1 u^3 - b u v^2 - f) h^dim, so that dot(gradient(p), q)
/// is the directional derivative of the energy at p along q.
Pair gradient(const Pair& p, const Params& params);

/// Phi = <J'(p), p> = ||p||^2 - A - B.
double nehari_Phi(const Pair& p, const Params& params);

/// <Phi'(p), p> = 2||p||^2 - 4A - B. On the Nehari manifold this is
/// ||p||^2 - 3A; its sign separates N+ (> 0), N0 (= 0) and N- (< 0).
double phi_prime_pairing(const Pair& p, const Params& params);

/// Strong-form residual of the system at every node (no quadrature weight).
Pair strong_residual(const Pair& p, const Params& params);

/// max |strong residual| divided by the largest magnitude of any single
/// term of the equations at any node.
double scaled_pde_residual(const Pair& p, const Params& params);

}  // namespace nehari
