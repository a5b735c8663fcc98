#include "nehari/fibering.h"

#include <cmath>
#include <limits>
#include <sstream>

namespace nehari {

namespace {

// Root of phi'(t) = t n - A t^3 - B on [lo, hi], where phi' changes sign.
// Newton steps are taken when they stay inside the current bracket,
// otherwise the bracket is bisected.
double bracketed_root(double n, double A, double B, double lo, double hi) {
  auto dphi = [&](double t) { return t * n - A * t * t * t - B; };
  auto ddphi = [&](double t) { return n - 3.0 * A * t * t; };

  double f_lo = dphi(lo);
  double f_hi = dphi(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;

  double t = 0.5 * (lo + hi);
  for (int iter = 0; iter < 400; ++iter) {
    const double ft = dphi(t);
    if (ft == 0.0) return t;
    if ((ft > 0.0) == (f_lo > 0.0)) {
      lo = t;
      f_lo = ft;
    } else {
      hi = t;
      f_hi = ft;
    }
    const double d = ddphi(t);
    double next = (d != 0.0) ? t - ft / d : lo - 1.0;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 2.0 * std::numeric_limits<double>::epsilon() * std::abs(next) ||
        hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(hi)) {
      t = next;
      break;
    }
    t = next;
  }
  // Bisection guarantees t is inside the bracket; finish with the best of the
  // three candidates.
  double best = t;
  double best_res = std::abs(dphi(t));
  for (double c : {lo, hi}) {
    const double r = std::abs(dphi(c));
    if (r < best_res) {
      best = c;
      best_res = r;
    }
  }
  return best;
}

}  // namespace

const char* to_string(RootClass c) {
  switch (c) {
    case RootClass::Plus:
      return "N+";
    case RootClass::Zero:
      return "N0";
    case RootClass::Minus:
      return "N-";
  }
  return "?";
}

const char* to_string(Branch b) { return b == Branch::Plus ? "N+" : "N-"; }

Branch branch_from_string(const std::string& s) {
  if (s == "N+" || s == "plus" || s == "ground") return Branch::Plus;
  if (s == "N-" || s == "minus" || s == "bound") return Branch::Minus;
  throw std::invalid_argument("unknown branch '" + s + "'");
}

std::optional<double> FiberingAnalysis::root_for(Branch b) const {
  const RootClass want = b == Branch::Plus ? RootClass::Plus : RootClass::Minus;
  for (const auto& r : roots) {
    if (r.cls == want) return r.t;
  }
  return std::nullopt;
}

bool FiberingAnalysis::has_degenerate_root() const {
  for (const auto& r : roots) {
    if (r.cls == RootClass::Zero) return true;
  }
  return false;
}

double tangency_window(double norm_sq, double A) { return 1e-12 * (std::pow(norm_sq, 1.5) / std::sqrt(A)); }

FiberingAnalysis analyze(double norm_sq, double A, double B) {
  if (!(norm_sq > 0.0) || !std::isfinite(norm_sq)) {
    throw std::invalid_argument("fibering analysis needs norm_sq > 0");
  }
  if (!(A > 0.0) || !std::isfinite(A)) throw std::invalid_argument("fibering analysis needs A > 0");
  if (!std::isfinite(B)) throw std::invalid_argument("fibering analysis needs a finite B");

  FiberingAnalysis out;
  out.norm_sq = norm_sq;
  out.A = A;
  out.B = B;
  out.t_turn = std::sqrt(norm_sq / (3.0 * A));
  out.psi_max = (2.0 / 3.0) * norm_sq * out.t_turn;

  if (std::abs(B - out.psi_max) <= tangency_window(norm_sq, A)) {
    out.roots.push_back({out.t_turn, RootClass::Zero});
    return out;
  }
  if (B > out.psi_max) return out;

  // phi' < 0 beyond this point: psi(T) <= T n - A T^3 < -|B| for this T.
  const double upper = std::sqrt(norm_sq / A) + std::cbrt(std::abs(B) / A) + 1.0;
  if (B > 0.0) {
    out.roots.push_back({bracketed_root(norm_sq, A, B, 0.0, out.t_turn), RootClass::Plus});
  }
  out.roots.push_back({bracketed_root(norm_sq, A, B, out.t_turn, upper), RootClass::Minus});
  return out;
}

FiberingAnalysis analyze_direction(const Pair& p, const Params& params) {
  if (p.is_zero()) throw std::invalid_argument("fibering analysis of the zero direction");
  const Functionals fn = functionals(p, params);
  return analyze(fn.norm_sq, fn.A, fn.B);
}

NoSuchBranch::NoSuchBranch(Branch target_, double norm_sq_, double A_, double B_, double psi_max_)
    : std::runtime_error([&] {
        std::ostringstream msg;
        msg.precision(17);
        msg << "direction admits no " << to_string(target_) << " root (norm_sq=" << norm_sq_ << ", A=" << A_
            << ", B=" << B_ << ", psi_max=" << psi_max_ << ")";
        return msg.str();
      }()),
      target(target_),
      norm_sq(norm_sq_),
      A(A_),
      B(B_),
      psi_max(psi_max_) {}

std::optional<Pair> try_retract(const Pair& p, const Params& params, Branch target) {
  const FiberingAnalysis fa = analyze_direction(p, params);
  const auto t = fa.root_for(target);
  if (!t) return std::nullopt;
  return *t * p;
}

Pair retract(const Pair& p, const Params& params, Branch target) {
  const FiberingAnalysis fa = analyze_direction(p, params);
  const auto t = fa.root_for(target);
  if (!t) throw NoSuchBranch(target, fa.norm_sq, fa.A, fa.B, fa.psi_max);
  return *t * p;
}

}  // namespace nehari
