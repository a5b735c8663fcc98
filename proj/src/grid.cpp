#include "nehari/grid.h"

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

namespace nehari {

Grid::Grid(int dim, std::array<double, kMaxDim> extents, std::array<int, kMaxDim> points) : dim_(dim) {
  if (dim < 1 || dim > kMaxDim) {
    throw std::invalid_argument("grid dimension must be 1 or 2, got " + std::to_string(dim));
  }
  size_ = 1;
  weight_ = 1.0;
  for (int a = 0; a < dim; ++a) {
    if (!(extents[a] > 0.0) || !std::isfinite(extents[a])) {
      throw std::invalid_argument("grid extent must be positive and finite");
    }
    if (points[a] < 3) {
      throw std::invalid_argument("grid needs at least 3 interior points per axis, got " +
                                  std::to_string(points[a]));
    }
    points_[a] = points[a];
    spacing_[a] = extents[a] / (points[a] + 1);
    weight_ *= spacing_[a];
    size_ *= static_cast<std::size_t>(points[a]);
  }
}

Grid Grid::line(double length, int points) { return Grid(1, {length, 0.0}, {points, 1}); }

Grid Grid::box(double length_x, double length_y, int points_x, int points_y) {
  return Grid(2, {length_x, length_y}, {points_x, points_y});
}

std::array<int, Grid::kMaxDim> Grid::multi_index(std::size_t node) const {
  const auto nx = static_cast<std::size_t>(points_[0]);
  return {static_cast<int>(node % nx), static_cast<int>(node / nx)};
}

bool Grid::operator==(const Grid& other) const {
  return dim_ == other.dim_ && points_ == other.points_ && spacing_ == other.spacing_;
}

Field::Field(const Grid& g) : grid(g), values(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.size()))) {}

Field::Field(const Grid& g, Eigen::VectorXd v) : grid(g), values(std::move(v)) {
  if (static_cast<std::size_t>(values.size()) != g.size()) {
    std::ostringstream msg;
    msg << "field has " << values.size() << " values but the grid has " << g.size() << " interior nodes";
    throw GridMismatch(msg.str());
  }
}

void require_same_grid(const Grid& a, const Grid& b, const char* context) {
  if (a != b) throw GridMismatch(std::string(context) + ": operands live on different grids");
}

Field operator+(const Field& a, const Field& b) {
  require_same_grid(a.grid, b.grid, "field addition");
  return Field(a.grid, a.values + b.values);
}

Field operator-(const Field& a, const Field& b) {
  require_same_grid(a.grid, b.grid, "field subtraction");
  return Field(a.grid, a.values - b.values);
}

Field operator*(double s, const Field& a) { return Field(a.grid, s * a.values); }

Pair::Pair(Field u_, Field v_) : u(std::move(u_)), v(std::move(v_)) {
  require_same_grid(u.grid, v.grid, "pair construction");
}

Pair operator+(const Pair& a, const Pair& b) { return Pair(a.u + b.u, a.v + b.v); }
Pair operator-(const Pair& a, const Pair& b) { return Pair(a.u - b.u, a.v - b.v); }
Pair operator*(double s, const Pair& p) { return Pair(s * p.u, s * p.v); }

double dot(const Pair& a, const Pair& b) {
  require_same_grid(a.grid(), b.grid(), "pair dot product");
  return a.u.values.dot(b.u.values) + a.v.values.dot(b.v.values);
}

double max_abs(const Pair& p) {
  double m = 0.0;
  if (p.u.values.size() > 0) m = std::max(m, p.u.values.cwiseAbs().maxCoeff());
  if (p.v.values.size() > 0) m = std::max(m, p.v.values.cwiseAbs().maxCoeff());
  return m;
}

Field laplacian_apply(const Grid& g, const Field& w) {
  require_same_grid(g, w.grid, "laplacian_apply");
  Field out(g);
  const auto& in = w.values;
  auto& res = out.values;
  const int nx = g.points(0);
  const double cx = 1.0 / (g.spacing(0) * g.spacing(0));
  if (g.dim() == 1) {
    for (int i = 0; i < nx; ++i) {
      const double left = i > 0 ? in[i - 1] : 0.0;
      const double right = i + 1 < nx ? in[i + 1] : 0.0;
      res[i] = cx * (2.0 * in[i] - left - right);
    }
    return out;
  }
  const int ny = g.points(1);
  const double cy = 1.0 / (g.spacing(1) * g.spacing(1));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::size_t k = g.node(i, j);
      const double c = in[k];
      const double west = i > 0 ? in[k - 1] : 0.0;
      const double east = i + 1 < nx ? in[k + 1] : 0.0;
      const double south = j > 0 ? in[k - nx] : 0.0;
      const double north = j + 1 < ny ? in[k + nx] : 0.0;
      res[k] = cx * (2.0 * c - west - east) + cy * (2.0 * c - south - north);
    }
  }
  return out;
}

double integrate(const Grid& g, const Field& w) {
  require_same_grid(g, w.grid, "integrate");
  return w.values.sum() * g.weight();
}

double integrate_product(const Field& a, const Field& b) {
  require_same_grid(a.grid, b.grid, "integrate_product");
  return a.values.dot(b.values) * a.grid.weight();
}

double field_h_norm_sq(const Field& w, double lambda) {
  const Field lap = laplacian_apply(w.grid, w);
  return integrate_product(w, lap) + lambda * integrate_product(w, w);
}

double h_norm_sq(const Pair& p, double lambda1, double lambda2) {
  return field_h_norm_sq(p.u, lambda1) + field_h_norm_sq(p.v, lambda2);
}

double l4_norm4(const Field& w) { return w.values.array().square().square().sum() * w.grid.weight(); }

double l43_norm(const Field& w) {
  const double s = w.values.array().abs().pow(4.0 / 3.0).sum() * w.grid.weight();
  return std::pow(s, 0.75);
}

Field first_eigenvector(const Grid& g) {
  Field out(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const auto idx = g.multi_index(k);
    double value = 1.0;
    for (int a = 0; a < g.dim(); ++a) {
      value *= std::sin(std::numbers::pi * g.coordinate(a, idx[a]) / g.extent(a));
    }
    out.values[static_cast<Eigen::Index>(k)] = value;
  }
  return out;
}

double first_discrete_eigenvalue(const Grid& g) {
  double mu = 0.0;
  for (int a = 0; a < g.dim(); ++a) {
    const double h = g.spacing(a);
    mu += (2.0 / (h * h)) * (1.0 - std::cos(std::numbers::pi * h / g.extent(a)));
  }
  return mu;
}

Eigen::SparseMatrix<double> laplacian_matrix(const Grid& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(n) * (1 + 2 * g.dim()));
  const int nx = g.points(0);
  const int ny = g.dim() == 2 ? g.points(1) : 1;
  const double cx = 1.0 / (g.spacing(0) * g.spacing(0));
  const double cy = g.dim() == 2 ? 1.0 / (g.spacing(1) * g.spacing(1)) : 0.0;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const auto k = static_cast<Eigen::Index>(g.node(i, j));
      entries.emplace_back(k, k, 2.0 * cx + 2.0 * cy);
      if (i > 0) entries.emplace_back(k, k - 1, -cx);
      if (i + 1 < nx) entries.emplace_back(k, k + 1, -cx);
      if (j > 0) entries.emplace_back(k, k - nx, -cy);
      if (j + 1 < ny) entries.emplace_back(k, k + nx, -cy);
    }
  }
  Eigen::SparseMatrix<double> m(n, n);
  m.setFromTriplets(entries.begin(), entries.end());
  return m;
}

ShiftedLaplacianSolver::ShiftedLaplacianSolver(const Grid& g, double lambda) : grid_(g), lambda_(lambda) {
  Eigen::SparseMatrix<double> m = laplacian_matrix(g);
  for (Eigen::Index k = 0; k < m.rows(); ++k) m.coeffRef(k, k) += lambda;
  auto factor = std::make_shared<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>(m);
  if (factor->info() != Eigen::Success) {
    throw std::runtime_error("factorisation of the shifted Laplacian failed");
  }
  factor_ = std::move(factor);
}

Field ShiftedLaplacianSolver::solve(const Field& rhs) const {
  require_same_grid(grid_, rhs.grid, "ShiftedLaplacianSolver::solve");
  return Field(grid_, factor_->solve(rhs.values));
}

}  // namespace nehari
