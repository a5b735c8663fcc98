#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <array>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>

namespace nehari {

/// Thrown when two objects that must share a mesh do not.
class GridMismatch : public std::invalid_argument {
public:
  explicit GridMismatch(const std::string& what) : std::invalid_argument(what) {}
};

/// Uniform tensor mesh of the box (0,L_1) x ... x (0,L_dim), dim in {1,2}.
///
/// Only interior nodes carry unknowns; boundary nodes are implicit zeros
/// (homogeneous Dirichlet). Node k is stored row-major, i.e. in 2D the
/// x-index runs fastest: k = i + nx * j.
class Grid {
public:
  static constexpr int kMaxDim = 2;

  Grid() = default;
  Grid(int dim, std::array<double, kMaxDim> extents, std::array<int, kMaxDim> points);

  static Grid line(double length, int points);
  static Grid box(double length_x, double length_y, int points_x, int points_y);

  int dim() const { return dim_; }
  int points(int axis) const { return points_[axis]; }
  double spacing(int axis) const { return spacing_[axis]; }
  /// spacing * (points + 1); exact by construction since the spacing is
  /// what is stored.
  double extent(int axis) const { return spacing_[axis] * (points_[axis] + 1); }
  /// Quadrature weight h^dim of the interior rectangle rule.
  double weight() const { return weight_; }
  std::size_t size() const { return size_; }

  /// Coordinate of interior node `index` (0-based) along `axis`.
  double coordinate(int axis, int index) const { return (index + 1) * spacing_[axis]; }
  std::array<int, kMaxDim> multi_index(std::size_t node) const;
  std::size_t node(int i, int j = 0) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(points_[0]) * static_cast<std::size_t>(j);
  }

  bool operator==(const Grid& other) const;
  bool operator!=(const Grid& other) const { return !(*this == other); }

private:
  int dim_ = 0;
  std::array<int, kMaxDim> points_{1, 1};
  std::array<double, kMaxDim> spacing_{0.0, 0.0};
  double weight_ = 0.0;
  std::size_t size_ = 0;
};

/// Nodal values of one real component on the interior nodes of a grid.
struct Field {
  Grid grid;
  Eigen::VectorXd values;

  Field() = default;
  explicit Field(const Grid& g);  // zero field
  Field(const Grid& g, Eigen::VectorXd v);

  std::size_t size() const { return static_cast<std::size_t>(values.size()); }
  bool all_finite() const { return values.allFinite(); }
};

Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(double s, const Field& a);

/// A state (u, v) of the coupled system; both components live on one grid.
struct Pair {
  Field u;
  Field v;

  Pair() = default;
  Pair(Field u_, Field v_);
  static Pair zeros(const Grid& g) { return Pair(Field(g), Field(g)); }

  const Grid& grid() const { return u.grid; }
  bool is_zero() const { return u.values.isZero(0.0) && v.values.isZero(0.0); }
};

Pair operator+(const Pair& a, const Pair& b);
Pair operator-(const Pair& a, const Pair& b);
Pair operator*(double s, const Pair& p);

/// Euclidean dot product of nodal values over both components.
double dot(const Pair& a, const Pair& b);
double max_abs(const Pair& p);

void require_same_grid(const Grid& a, const Grid& b, const char* context);

/// Second-order centered stencil of -Laplace with zero ghost values.
Field laplacian_apply(const Grid& g, const Field& w);

/// Interior rectangle rule: sum(values) * h^dim.
double integrate(const Grid& g, const Field& w);
double integrate_product(const Field& a, const Field& b);

/// int(|grad w|^2 + lambda w^2), with the gradient term taken as int(w (-Laplace w)).
double field_h_norm_sq(const Field& w, double lambda);

/// ||(u,v)||^2 with the lambda-weighted product norm.
double h_norm_sq(const Pair& p, double lambda1, double lambda2);

double l4_norm4(const Field& w);
double l43_norm(const Field& w);

/// Sampled first Dirichlet eigenfunction (product of sines), which is also an
/// exact eigenvector of the discrete stencil.
Field first_eigenvector(const Grid& g);

/// Smallest eigenvalue of the discrete -Laplace: sum over axes of (2/h^2)(1 - cos(pi h / L)).
double first_discrete_eigenvalue(const Grid& g);

/// Sparse matrix of the stencil (unweighted, acts on nodal values).
Eigen::SparseMatrix<double> laplacian_matrix(const Grid& g);

/// Factorised solver for (-Laplace + lambda) x = b on the interior nodes.
class ShiftedLaplacianSolver {
public:
  ShiftedLaplacianSolver(const Grid& g, double lambda);

  Field solve(const Field& rhs) const;
  const Grid& grid() const { return grid_; }
  double shift() const { return lambda_; }

private:
  Grid grid_;
  double lambda_;
  std::shared_ptr<const Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> factor_;
};

}  // namespace nehari
