#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "parest/errors.hpp"

namespace parest {

/// Uniform mesh on the interval (a, b_end) with zero-trace boundary nodes.
struct Mesh1D {
  double a = 0.0;
  double b_end = 1.0;
  int n_cells = 4;

  Mesh1D() = default;
  Mesh1D(double left, double right, int cells);

  double h() const { return (b_end - a) / n_cells; }
  int interior_count() const { return n_cells - 1; }
  /// Node coordinate, i in [0, n_cells].
  double node(int i) const { return a + i * h(); }
  /// Cell midpoint coordinate, c in [0, n_cells).
  double midpoint(int c) const { return a + (c + 0.5) * h(); }

  bool operator==(const Mesh1D& o) const {
    return a == o.a && b_end == o.b_end && n_cells == o.n_cells;
  }
};

/// Values on the interior nodes; the boundary trace is identically zero.
class GridFunction {
 public:
  GridFunction() = default;
  explicit GridFunction(const Mesh1D& mesh);
  GridFunction(const Mesh1D& mesh, std::vector<double> values);

  static GridFunction sample(const Mesh1D& mesh, const std::function<double(double)>& f);

  const Mesh1D& mesh() const { return mesh_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  int size() const { return static_cast<int>(values_.size()); }
  double operator[](int i) const { return values_[i]; }
  double& operator[](int i) { return values_[i]; }
  /// Coordinate of interior node i (i in [0, n_cells-2]).
  double x(int i) const { return mesh_.node(i + 1); }

  GridFunction& operator+=(const GridFunction& o);
  GridFunction& operator-=(const GridFunction& o);
  GridFunction& operator*=(double c);

 private:
  Mesh1D mesh_;
  std::vector<double> values_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(double c, GridFunction a);

/// Values on all nodes of the mesh, boundary included. Used for fields that
/// carry no boundary condition (flux components F, coefficient slices, ...).
class NodeField {
 public:
  NodeField() = default;
  explicit NodeField(const Mesh1D& mesh);
  NodeField(const Mesh1D& mesh, std::vector<double> values);

  static NodeField sample(const Mesh1D& mesh, const std::function<double(double)>& f);

  const Mesh1D& mesh() const { return mesh_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  int size() const { return static_cast<int>(values_.size()); }
  double operator[](int i) const { return values_[i]; }
  double& operator[](int i) { return values_[i]; }
  double x(int i) const { return mesh_.node(i); }

  NodeField& operator+=(const NodeField& o);
  NodeField& operator-=(const NodeField& o);
  NodeField& operator*=(double c);

 private:
  Mesh1D mesh_;
  std::vector<double> values_;
};

NodeField operator+(NodeField a, const NodeField& b);
NodeField operator-(NodeField a, const NodeField& b);
NodeField operator*(double c, NodeField a);

/// Uniform time grid on [0, T].
struct TimeGrid {
  double T = 1.0;
  int n_steps = 1;

  TimeGrid() = default;
  TimeGrid(double horizon, int steps);

  double dt() const { return T / n_steps; }
  double node(int j) const { return j * dt(); }
  int n_nodes() const { return n_steps + 1; }
};

/// Time-indexed sequence of grid functions sharing one mesh.
struct SpaceTimeSeries {
  TimeGrid time_grid;
  std::vector<GridFunction> frames;

  const Mesh1D& mesh() const { return frames.front().mesh(); }
  /// Linear interpolation between stored frames; t clamped to [0, T].
  GridFunction at_time(double t) const;
};

// --- Quadrature and norms -------------------------------------------------

/// Trapezoid of u^2 over the interval; boundary trace is zero.
double norm_h0(const GridFunction& u);
/// Trapezoid of v^2 over the interval, boundary nodes included.
double norm_h0(const NodeField& v);
/// Trapezoid inner product (u, v) over interior nodes.
double inner_h0(const GridFunction& u, const GridFunction& v);

/// (||u||_{H0}^2 + ||grad u||_{H0}^2)^{1/2}; centered differences, one-sided
/// at the boundary nodes where the zero trace supplies the missing value.
double norm_h1(const GridFunction& u);

/// Dual norm realized by the Riesz solve (-Lap_h + I) w = phi.
double norm_hminus1(const GridFunction& phi);

/// Trapezoid of F^2 / b over the interval. Throws NonCoercive if b <= 0 anywhere.
double weighted_inner_binv(const NodeField& F, const NodeField& b_slice);

/// Trapezoid of exp(-2 K s) g(s) ds over the whole time grid.
double time_integral(std::span<const double> g, const TimeGrid& tg, double K);
/// Running trapezoid: entry j holds the integral over [0, t_j].
std::vector<double> time_integral_prefix(std::span<const double> g, const TimeGrid& tg,
                                         double K);

// --- Discrete differential structure --------------------------------------

/// Gradient at every node: centered in the interior (the zero trace supplies
/// the ghost values), one-sided at the two boundary nodes.
NodeField node_gradient(const GridFunction& u);

/// Gradient at cell midpoints: (u_{i+1} - u_i)/h, length n_cells.
std::vector<double> cell_gradient(const GridFunction& u);

/// Node field averaged onto cell midpoints, length n_cells.
std::vector<double> midpoint_average(const NodeField& F);

/// The pairing (grad_h u, F) = h * sum over cells of Du_{c} * avg(F)_{c}.
/// Adjoint, up to sign, of the flux-difference divergence in apply_source_weak.
double dual_pair_gradient(const GridFunction& u, const NodeField& F);

}  // namespace parest
