#include "test_support.h"

#include "nehari/grid.h"

#include <doctest.h>

#include <Eigen/Dense>

using namespace nehari;
using testing::random_field;
using testing::sampled;

namespace {

// Dense -Laplace on n interior nodes of (0,L), built entry by entry.
Eigen::MatrixXd dense_1d(int n, double L) {
  const double h = L / (n + 1);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = 2.0 / (h * h);
    if (i > 0) m(i, i - 1) = -1.0 / (h * h);
    if (i + 1 < n) m(i, i + 1) = -1.0 / (h * h);
  }
  return m;
}

}  // namespace

TEST_CASE("grid geometry and indexing") {
  const Grid g = Grid::box(2.0, 1.0, 7, 3);
  CHECK(g.dim() == 2);
  CHECK(g.size() == 21);
  CHECK(g.spacing(0) == doctest::Approx(0.25));
  CHECK(g.extent(0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(g.weight() == doctest::Approx(0.25 * 0.25));
  for (std::size_t k = 0; k < g.size(); ++k) {
    const auto ij = g.multi_index(k);
    CHECK(g.node(ij[0], ij[1]) == k);
  }
  CHECK(g.node(1, 0) == 1);
  CHECK(g.node(0, 1) == 7);
  CHECK(g.coordinate(0, 0) == doctest::Approx(0.25));
  CHECK_THROWS_AS(Grid(3, {1.0, 1.0}, {5, 5}), std::invalid_argument);
  CHECK_THROWS_AS(Grid::line(1.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(Grid::line(-1.0, 9), std::invalid_argument);
  CHECK(Grid::line(1.0, 9) == Grid::line(1.0, 9));
  CHECK(Grid::line(1.0, 9) != Grid::line(1.0, 11));
}

TEST_CASE("fields on different grids are rejected") {
  const Field a(Grid::line(1.0, 9));
  const Field b(Grid::line(1.0, 11));
  CHECK_THROWS_AS(a + b, GridMismatch);
  CHECK_THROWS_AS(integrate_product(a, b), GridMismatch);
  CHECK_THROWS_AS(Pair(a, b), GridMismatch);
}

TEST_CASE("laplacian of zero is zero") {
  const Grid g = Grid::box(1.0, 1.0, 5, 6);
  CHECK(laplacian_apply(g, Field(g)).values.isZero(0.0));
}

TEST_CASE("1D laplacian matches the dense stencil eigendecomposition") {
  for (int n : {5, 49, 199}) {
    const double L = 1.7;
    const Grid g = Grid::line(L, n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_1d(n, L));
    const double mu_dense = es.eigenvalues()[0];
    const double h = L / (n + 1);
    const double mu_formula = 2.0 / (h * h) * (1.0 - std::cos(M_PI * h / L));
    CHECK(mu_dense == doctest::Approx(mu_formula).epsilon(1e-11));
    CHECK(first_discrete_eigenvalue(g) == doctest::Approx(mu_formula).epsilon(1e-14));

    const Field w = first_eigenvector(g);
    const Field lw = laplacian_apply(g, w);
    const double err = (lw.values - mu_formula * w.values).cwiseAbs().maxCoeff();
    CHECK(err <= 1e-14 * (4.0 / (h * h)) * w.values.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("2D laplacian is the Kronecker sum of the 1D stencils") {
  const int nx = 6, ny = 4;
  const Grid g = Grid::box(1.0, 2.0, nx, ny);
  const Eigen::MatrixXd ax = dense_1d(nx, 1.0);
  const Eigen::MatrixXd ay = dense_1d(ny, 2.0);
  // x runs fastest: K = I_y (x) A_x + A_y (x) I_x
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(nx * ny, nx * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      for (int jj = 0; jj < ny; ++jj)
        for (int ii = 0; ii < nx; ++ii) {
          double v = 0.0;
          if (j == jj) v += ax(i, ii);
          if (i == ii) v += ay(j, jj);
          k(i + nx * j, ii + nx * jj) = v;
        }
  std::mt19937_64 rng(5);
  const Field w = random_field(g, rng);
  const Eigen::VectorXd expect = k * w.values;
  CHECK((laplacian_apply(g, w).values - expect).cwiseAbs().maxCoeff() <= 1e-10 * expect.cwiseAbs().maxCoeff());
  CHECK((Eigen::MatrixXd(laplacian_matrix(g)) - k).cwiseAbs().maxCoeff() == doctest::Approx(0.0));

  const Field e = first_eigenvector(g);
  const double mu = dense_1d(nx, 1.0).selfadjointView<Eigen::Lower>().eigenvalues().minCoeff() +
                    dense_1d(ny, 2.0).selfadjointView<Eigen::Lower>().eigenvalues().minCoeff();
  CHECK(first_discrete_eigenvalue(g) == doctest::Approx(mu).epsilon(1e-11));
  CHECK((laplacian_apply(g, e).values - mu * e.values).cwiseAbs().maxCoeff() <= 1e-10 * mu);
}

TEST_CASE("interior rectangle quadrature") {
  const Grid g99 = Grid::line(1.0, 99);
  CHECK(integrate(g99, Field(g99)) == 0.0);
  CHECK(integrate(g99, Field(g99, Eigen::VectorXd::Ones(99))) == doctest::Approx(0.99).epsilon(1e-14));

  auto err = [](int n) {
    const Grid g = Grid::line(1.0, n);
    return std::abs(integrate(g, sampled(g, [](double x, double) { return x * (1.0 - x); })) - 1.0 / 6.0);
  };
  const double slope = std::log(err(49) / err(99)) / std::log(2.0);
  CHECK(slope == doctest::Approx(2.0).epsilon(0.02));
  CHECK(err(399) < 1e-5);

  double prev = 1.0;
  for (int n : {4, 16, 64, 256}) {
    const Grid g = Grid::box(1.0, 0.5, n, n);
    const double gap = std::abs(integrate(g, Field(g, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(g.size())))) - 0.5);
    CHECK(gap < prev);
    prev = gap;
  }
  CHECK(prev < 0.01);
}

TEST_CASE("H norm of the first eigenvector") {
  const Grid g = Grid::line(1.0, 99);
  CHECK(h_norm_sq(Pair::zeros(g), 1.0, 1.0) == 0.0);
  const Field u = first_eigenvector(g);
  const double mu = first_discrete_eigenvalue(g);
  const double expect = (mu + 1.0) * integrate_product(u, u);
  CHECK(field_h_norm_sq(u, 1.0) == doctest::Approx(expect).epsilon(1e-13));
  CHECK(h_norm_sq(Pair(u, Field(g)), 1.0, 3.0) == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("Lebesgue norms") {
  const Grid g = Grid::line(1.0, 99);
  CHECK(l4_norm4(Field(g)) == 0.0);
  CHECK(l43_norm(Field(g)) == 0.0);
  const double c = 1.3;
  const Field w(g, Eigen::VectorXd::Constant(99, c));
  CHECK(l4_norm4(w) == doctest::Approx(std::pow(c, 4) * 0.99).epsilon(1e-14));
  CHECK(l43_norm(w) == doctest::Approx(c * std::pow(0.99, 0.75)).epsilon(1e-14));
  CHECK(l43_norm(-1.0 * w) == doctest::Approx(l43_norm(w)).epsilon(1e-15));
}

TEST_CASE("shifted laplacian solver inverts the stencil") {
  for (const Grid& g : {Grid::line(2.0, 41), Grid::box(1.0, 1.0, 9, 12)}) {
    std::mt19937_64 rng(11);
    const Field b = random_field(g, rng);
    const ShiftedLaplacianSolver solver(g, 0.7);
    const Field x = solver.solve(b);
    const Field back = laplacian_apply(g, x) + 0.7 * x;
    CHECK((back.values - b.values).cwiseAbs().maxCoeff() <= 1e-10 * b.values.cwiseAbs().maxCoeff());
    CHECK_THROWS_AS(solver.solve(Field(Grid::line(2.0, 40))), GridMismatch);
  }
}
