#pragma once

#include "nehari/functional.h"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nehari {

/// Part of the Nehari manifold a point belongs to.
enum class RootClass { Plus, Zero, Minus };

/// The two non-degenerate branches a minimisation can target.
enum class Branch { Plus, Minus };

const char* to_string(RootClass c);  // "N+", "N0", "N-"
const char* to_string(Branch b);     // "N+", "N-"
Branch branch_from_string(const std::string& s);

struct FiberingRoot {
  double t = 0.0;
  RootClass cls = RootClass::Minus;
};

/// Stationary points of phi(t) = J(t u, t v) = norm_sq t^2/2 - A t^4/4 - B t.
///
/// phi'(t) = t norm_sq - A t^3 - B. The cubic psi(t) = t norm_sq - A t^3 is
/// strictly concave on t > 0 with maximum psi_max at t_turn, so the number of
/// positive roots is fixed by comparing B with psi_max.
struct FiberingAnalysis {
  double norm_sq = 0.0;
  double A = 0.0;
  double B = 0.0;
  double t_turn = 0.0;   // sqrt(norm_sq / (3A))
  double psi_max = 0.0;  // (2/3) norm_sq t_turn
  std::vector<FiberingRoot> roots;

  std::optional<double> root_for(Branch b) const;
  bool has_degenerate_root() const;
};

/// Half-width of the band |B - psi_max| treated as a double root.
double tangency_window(double norm_sq, double A);

/// Positive roots of t norm_sq - A t^3 - B and their classes.
/// Throws std::invalid_argument if norm_sq <= 0 or A <= 0.
FiberingAnalysis analyze(double norm_sq, double A, double B);

/// analyze() with the functionals of the direction p.
FiberingAnalysis analyze_direction(const Pair& p, const Params& params);

/// The direction p admits no stationary point of the requested class.
class NoSuchBranch : public std::runtime_error {
public:
  NoSuchBranch(Branch target, double norm_sq, double A, double B, double psi_max);

  Branch target;
  double norm_sq;
  double A;
  double B;
  double psi_max;
};

/// Rescales p onto the requested branch of the Nehari manifold: returns t p
/// for the unique root t of that class.
Pair retract(const Pair& p, const Params& params, Branch target);

/// Same as retract() but returns nullopt instead of throwing NoSuchBranch.
std::optional<Pair> try_retract(const Pair& p, const Params& params, Branch target);

}  // namespace nehari
