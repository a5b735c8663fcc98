#pragma once

#include "nehari/fibering.h"

#include <cstdint>

namespace nehari {

struct S4Options {
  int restarts = 8;  // random starts, in addition to the first eigenvector
  std::uint64_t seed = 0;
  int max_iters = 20000;
  double tol = 1e-13;  // relative change of the ratio between sweeps
};

struct S4Estimate {
  double value = 0.0;
  bool converged = false;  // false: best-so-far after hitting max_iters
  int iterations = 0;      // total over all starts
};

/// Discrete best constant in |w|_4 <= S4 (int |grad w|^2 + lambda w^2)^(1/2).
///
/// Maximises |w|_4^4 on the unit sphere of the lambda-weighted norm by
/// normalised ascent along the Sobolev gradient (-Lap + lambda)^-1 w^3,
/// from the first eigenvector and `restarts` seeded random starts.
S4Estimate estimate_s4(const Grid& grid, double lambda, const S4Options& options = {});

struct ThresholdReport {
  double s4 = 0.0;
  double sup_A_bound = 0.0;
  double alpha = 0.0;
  double lambda_threshold = 0.0;
  double f_norm = 0.0;  // |f|_{4/3}
  double g_norm = 0.0;  // |g|_{4/3}
  bool degenerate_sources = false;  // f == 0 or g == 0
  bool satisfied = false;           // sources nonzero and max(f_norm, g_norm) < lambda_threshold
};

/// c in sup_{||(u,v)||=1} A <= c s4^4.
double sup_A_coefficient(double mu1, double mu2, double beta);

/// Threshold on the sources. Depends on the coefficients and s4 only; the
/// sources enter through f_norm, g_norm and the flags.
ThresholdReport compute_threshold(const Params& params, double s4);

/// Whether B(p) < (2/3) sqrt(1 / (3 A(p))) for a direction p with ||p|| = 1.
/// Throws std::invalid_argument if ||p|| differs from 1 by more than 1e-10.
bool check_B_bound(const Pair& p, const Params& params, const ThresholdReport& report);

/// B(p) / psi_max(p): scale invariant; > 1 means the fibering map along p
/// has no stationary point at all.
double tangency_ratio(const Pair& p, const Params& params);

struct TangencySearch {
  Pair direction;
  double ratio = 0.0;
  int iterations = 0;
};

/// Ascent on tangency_ratio starting from `start` (normally the source
/// direction (f, g)). Used to exhibit directions where the smallness
/// condition fails.
TangencySearch maximize_tangency_ratio(const Pair& start, const Params& params, int max_iters = 500);

}  // namespace nehari
