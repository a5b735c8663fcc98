#include "test_support.h"

#include "nehari/threshold.h"

#include <doctest.h>

using namespace nehari;
using testing::make_params;
using testing::random_field;
using testing::random_pair;
using testing::zero_source_params;

namespace {

Field sine(const Grid& g) {
  return testing::sampled(g, [](double x, double) { return std::sin(M_PI * x); });
}

double s4_ratio(const Field& w, double lambda) { return std::pow(l4_norm4(w), 0.25) / std::sqrt(field_h_norm_sq(w, lambda)); }

}  // namespace

TEST_CASE("S4 is stable across restarts and grid refinement") {
  const Grid g199 = Grid::line(1.0, 199);
  const S4Estimate a = estimate_s4(g199, 1.0);
  CHECK(a.converged);
  S4Options alone;
  alone.restarts = 0;
  const S4Estimate b = estimate_s4(g199, 1.0, alone);
  S4Options other;
  other.seed = 17;
  const S4Estimate c = estimate_s4(g199, 1.0, other);
  CHECK(b.value == doctest::Approx(a.value).epsilon(5e-4));
  CHECK(c.value == doctest::Approx(a.value).epsilon(5e-4));
  CHECK(a.value == doctest::Approx(0.3384748977546).epsilon(1e-9));

  const S4Estimate fine = estimate_s4(Grid::line(1.0, 399), 1.0);
  CHECK(std::abs(fine.value - a.value) <= 0.02 * a.value);
}

TEST_CASE("S4 bounds every sampled Sobolev ratio") {
  const Grid g = Grid::line(1.0, 49);
  const double s4 = estimate_s4(g, 1.0).value;
  std::mt19937_64 rng(1);
  for (int k = 0; k < 200; ++k) CHECK(s4_ratio(random_field(g, rng), 1.0) <= s4 * (1 + 1e-12));
  CHECK(s4_ratio(first_eigenvector(g), 1.0) <= s4 * (1 + 1e-12));
}

TEST_CASE("S4 decreases with the shift") {
  const Grid g = Grid::line(1.0, 49);
  const double s_small = estimate_s4(g, 0.5).value;
  const double s_big = estimate_s4(g, 4.0).value;
  CHECK(s_big < s_small);
}

TEST_CASE("threshold closed form") {
  const Grid g = Grid::line(1.0, 49);
  std::mt19937_64 rng(2);
  const double s4 = 0.3;
  for (double beta : {-0.5, 0.0, 0.5, 2.0}) {
    const Params pr = make_params(g, 1.0, 2.0, 1.5, 0.7, beta, random_field(g, rng), random_field(g, rng));
    const ThresholdReport r = compute_threshold(pr, s4);
    const double c = beta > 0 ? std::max({1.5, 0.7, beta}) : 1.5;
    CHECK(sup_A_coefficient(1.5, 0.7, beta) == c);
    const double alpha = (2.0 / 3.0) * std::sqrt(1.0 / (3.0 * c * std::pow(s4, 4)));
    CHECK(r.alpha == doctest::Approx(alpha).epsilon(1e-15));
    CHECK(r.lambda_threshold == doctest::Approx(alpha / (std::sqrt(2.0) * s4)).epsilon(1e-15));
    CHECK(r.f_norm == doctest::Approx(l43_norm(pr.f)).epsilon(1e-15));
    CHECK(r.satisfied == (std::max(r.f_norm, r.g_norm) < r.lambda_threshold));
    CHECK_FALSE(r.degenerate_sources);
  }
}

TEST_CASE("zero sources are degenerate, not small") {
  const Grid g = Grid::line(1.0, 49);
  const ThresholdReport r = compute_threshold(zero_source_params(g), 0.3);
  CHECK(r.degenerate_sources);
  CHECK_FALSE(r.satisfied);
  Params half = zero_source_params(g);
  half.f = sine(g);
  CHECK(compute_threshold(half, 0.3).degenerate_sources);
}

TEST_CASE("B bound over random unit directions") {
  const Grid g = Grid::line(1.0, 99);
  const double s4 = estimate_s4(g, 1.0).value;
  Params pr = make_params(g, 1, 1, 1, 1, 0.5, sine(g), sine(g));
  ThresholdReport r = compute_threshold(pr, s4);
  const double scale = 0.9 * r.lambda_threshold / l43_norm(pr.f);
  pr.f = scale * pr.f;
  pr.g = scale * pr.g;
  r = compute_threshold(pr, s4);
  REQUIRE(r.satisfied);
  std::mt19937_64 rng(3);
  for (int k = 0; k < 500; ++k) {
    const Pair p = random_pair(g, rng);
    const Pair unit = (1.0 / std::sqrt(h_norm_sq(p, pr))) * p;
    CHECK(check_B_bound(unit, pr, r));
    CHECK(check_B_bound(-1.0 * unit, pr, r));
  }
  CHECK_THROWS_AS(check_B_bound(2.0 * random_pair(g, rng), pr, r), std::invalid_argument);

  const Params none = zero_source_params(g);
  const Pair p = random_pair(g, rng);
  CHECK(check_B_bound((1.0 / std::sqrt(h_norm_sq(p, none))) * p, none, compute_threshold(none, s4)));
}

TEST_CASE("directed search breaks the bound once the sources are large") {
  const Grid g = Grid::line(1.0, 99);
  const double s4 = estimate_s4(g, 1.0).value;
  Params pr = make_params(g, 1, 1, 1, 1, 1.0, sine(g), sine(g));
  const ThresholdReport base = compute_threshold(pr, s4);
  bool broken = false;
  for (double rho = 0.5; rho < 3.0 && !broken; rho += 0.1) {
    Params scaled = pr;
    const double s = rho * base.lambda_threshold / l43_norm(pr.f);
    scaled.f = s * pr.f;
    scaled.g = s * pr.g;
    const TangencySearch t = maximize_tangency_ratio(Pair(scaled.f, scaled.g), scaled);
    CHECK(t.ratio == doctest::Approx(tangency_ratio(t.direction, scaled)).epsilon(1e-12));
    if (t.ratio > 1.0) {
      broken = true;
      CHECK_FALSE(compute_threshold(scaled, s4).satisfied);
    }
  }
  CHECK(broken);
}
