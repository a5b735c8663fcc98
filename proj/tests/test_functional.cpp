#include "test_support.h"

#include "nehari/functional.h"

#include <doctest.h>

using namespace nehari;
using testing::make_params;
using testing::random_field;
using testing::random_pair;
using testing::zero_source_params;

namespace {

// Energy summed node by node with the stencil written out.
double energy_by_hand(const Pair& p, const Params& pr) {
  const Grid& g = p.grid();
  const int n = g.points(0);
  const double h = g.spacing(0);
  const auto& u = p.u.values;
  const auto& v = p.v.values;
  double grad = 0.0, mass = 0.0, quart = 0.0, src = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double ul = i > 0 ? u[i - 1] : 0.0, ur = i < n ? u[i] : 0.0;
    const double vl = i > 0 ? v[i - 1] : 0.0, vr = i < n ? v[i] : 0.0;
    grad += ((ur - ul) * (ur - ul) + (vr - vl) * (vr - vl)) / (h * h) * h;
  }
  for (int i = 0; i < n; ++i) {
    mass += (pr.lambda1 * u[i] * u[i] + pr.lambda2 * v[i] * v[i]) * h;
    quart += (pr.mu1 * std::pow(u[i], 4) + pr.mu2 * std::pow(v[i], 4) + 2.0 * pr.beta * u[i] * u[i] * v[i] * v[i]) * h;
    src += (pr.f.values[i] * u[i] + pr.g.values[i] * v[i]) * h;
  }
  return 0.5 * (grad + mass) - 0.25 * quart - src;
}

Params random_params(const Grid& g, std::mt19937_64& rng) {
  return make_params(g, 1.3, 0.8, 1.1, 0.9, 0.4, random_field(g, rng), random_field(g, rng));
}

}  // namespace

TEST_CASE("params validation") {
  const Grid g = Grid::line(1.0, 9);
  Params p = zero_source_params(g);
  CHECK_NOTHROW(p.validate());
  CHECK(beta_lower_limit(4.0, 1.0) == doctest::Approx(-2.0));
  p.beta = -1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.beta = -0.99;
  CHECK_NOTHROW(p.validate());
  p.lambda1 = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = zero_source_params(g);
  p.mu2 = -1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = zero_source_params(g);
  p.g = Field(Grid::line(1.0, 11));
  CHECK_THROWS(p.validate());
}

TEST_CASE("quartic term A") {
  const Grid g = Grid::line(1.0, 49);
  std::mt19937_64 rng(1);
  Params pr = zero_source_params(g);
  pr.mu1 = 1.7;
  pr.mu2 = 0.6;
  CHECK(quartic_A(Pair::zeros(g), pr) == 0.0);
  const Field u = random_field(g, rng);
  CHECK(quartic_A(Pair(u, Field(g)), pr) == doctest::Approx(1.7 * l4_norm4(u)).epsilon(1e-14));

  // v proportional to u with mu1 |u|^4 = mu2 |v|^4: A = 2 (sqrt(mu1 mu2) + beta) |u|_4^2 |v|_4^2
  pr.beta = beta_lower_limit(pr.mu1, pr.mu2) + 0.1;
  const Field v = std::pow(pr.mu1 / pr.mu2, 0.25) * u;
  const Pair p(u, v);
  const double product = std::sqrt(l4_norm4(u) * l4_norm4(v));
  CHECK(quartic_A(p, pr) == doctest::Approx(0.2 * product).epsilon(1e-10));
  CHECK(quartic_A(p, pr) > 0.0);
  double direct = 0.0;
  for (Eigen::Index k = 0; k < u.values.size(); ++k) {
    const double a = u.values[k], b = v.values[k];
    direct += (pr.mu1 * a * a * a * a + pr.mu2 * b * b * b * b + 2.0 * pr.beta * a * a * b * b) * g.weight();
  }
  CHECK(quartic_A(p, pr) == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("source term B") {
  const Grid g = Grid::line(1.0, 99);
  const Field one(g, Eigen::VectorXd::Ones(99));
  const Params pr = make_params(g, 1, 1, 1, 1, 0, one, one);
  CHECK(source_B(Pair::zeros(g), pr) == 0.0);
  CHECK(source_B(Pair(one, one), pr) == doctest::Approx(1.98).epsilon(1e-14));
}

TEST_CASE("energy matches an independent term-by-term sum") {
  std::mt19937_64 rng(2);
  const Grid g = Grid::line(1.0, 37);
  const Params pr = random_params(g, rng);
  for (int k = 0; k < 20; ++k) {
    const Pair p = random_pair(g, rng);
    const EnergyBreakdown e = energy(p, pr);
    CHECK(e.total == doctest::Approx(energy_by_hand(p, pr)).epsilon(1e-12));
    CHECK(e.total == doctest::Approx(e.quadratic - e.quartic - e.source).epsilon(1e-15));
  }
  CHECK(energy(Pair::zeros(g), pr).total == 0.0);
}

TEST_CASE("energy on the manifold without sources is a quarter of the norm") {
  std::mt19937_64 rng(3);
  const Grid g = Grid::line(1.0, 29);
  const Params pr = zero_source_params(g);
  const Pair p = random_pair(g, rng);
  const double t = std::sqrt(h_norm_sq(p, pr) / quartic_A(p, pr));
  const Pair q = t * p;
  CHECK(std::abs(nehari_Phi(q, pr)) <= 1e-12 * h_norm_sq(q, pr));
  CHECK(energy(q, pr).total == doctest::Approx(0.25 * h_norm_sq(q, pr)).epsilon(1e-12));
}

TEST_CASE("gradient at the origin is the weighted source") {
  std::mt19937_64 rng(4);
  const Grid g = Grid::box(1.0, 1.0, 7, 5);
  const Params pr = make_params(g, 1, 2, 1, 1, 0.3, random_field(g, rng), random_field(g, rng));
  const Pair gr = gradient(Pair::zeros(g), pr);
  CHECK((gr.u.values + pr.f.values * g.weight()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((gr.v.values + pr.g.values * g.weight()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gradient matches central differences") {
  std::mt19937_64 rng(5);
  for (const Grid& g : {Grid::line(1.0, 19), Grid::box(1.0, 1.5, 6, 7)}) {
    const Params pr = random_params(g, rng);
    for (int k = 0; k < 10; ++k) {
      const Pair p = random_pair(g, rng), q = random_pair(g, rng);
      const double eps = 1e-6;
      const double fd = (energy(p + eps * q, pr).total - energy(p - eps * q, pr).total) / (2 * eps);
      const double an = dot(gradient(p, pr), q);
      CHECK(std::abs(fd - an) <= 1e-6 * std::max(1.0, std::abs(an)));
    }
  }
}

TEST_CASE("gradient is exchange symmetric") {
  std::mt19937_64 rng(6);
  const Grid g = Grid::line(1.0, 15);
  const Field f = random_field(g, rng);
  const Params pr = make_params(g, 1, 1, 1, 1, 0.7, f, f);
  const Field w = random_field(g, rng);
  const Field z = random_field(g, rng);
  const Pair a = gradient(Pair(w, z), pr);
  const Pair b = gradient(Pair(z, w), pr);
  CHECK((a.u.values - b.v.values).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.v.values - b.u.values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Nehari functional and pairing") {
  std::mt19937_64 rng(7);
  const Grid g = Grid::line(1.0, 25);
  const Params src = random_params(g, rng);
  CHECK(nehari_Phi(Pair::zeros(g), src) == 0.0);
  CHECK(phi_prime_pairing(Pair::zeros(g), src) == 0.0);

  const Pair p = random_pair(g, rng);
  CHECK(nehari_Phi(p, src) == doctest::Approx(dot(gradient(p, src), p)).epsilon(1e-11));
  const double N = h_norm_sq(p, src), A = quartic_A(p, src), B = source_B(p, src);
  CHECK(phi_prime_pairing(p, src) == doctest::Approx(2 * N - 4 * A - B).epsilon(1e-13));

  const Params pr = zero_source_params(g);
  const double t = std::sqrt(h_norm_sq(p, pr) / quartic_A(p, pr));
  CHECK(std::abs(nehari_Phi(t * p, pr)) <= 1e-12 * h_norm_sq(t * p, pr));
  CHECK(phi_prime_pairing(t * p, pr) == doctest::Approx(-2.0 * h_norm_sq(t * p, pr)).epsilon(1e-11));
}

TEST_CASE("strong residual vanishes on a manufactured solution") {
  std::mt19937_64 rng(8);
  const Grid g = Grid::box(1.0, 1.0, 9, 8);
  const Field u = random_field(g, rng), v = random_field(g, rng);
  Params pr = make_params(g, 1.5, 0.5, 1.2, 0.8, -0.3, Field(g), Field(g));
  const Eigen::ArrayXd a = u.values.array(), b = v.values.array();
  pr.f = Field(g, (laplacian_apply(g, u).values.array() + 1.5 * a - 1.2 * a.cube() + 0.3 * a * b * b).matrix());
  pr.g = Field(g, (laplacian_apply(g, v).values.array() + 0.5 * b - 0.8 * b.cube() + 0.3 * a * a * b).matrix());
  const Pair p(u, v);
  CHECK(scaled_pde_residual(p, pr) < 1e-14);
  CHECK(strong_residual(p, pr).u.values.cwiseAbs().maxCoeff() < 1e-9);
  CHECK(scaled_pde_residual(p + 1e-3 * Pair(u, v), pr) > 1e-5);
}
