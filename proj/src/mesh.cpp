#include "parest/mesh.hpp"

#include <algorithm>
#include <cmath>

namespace parest {

namespace {

void require_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw Error(Errc::NonFiniteSample, what);
  }
}

void require_same_mesh(const Mesh1D& a, const Mesh1D& b) {
  if (!(a == b)) throw Error(Errc::MeshMismatch, "operands live on different meshes");
}

}  // namespace

Mesh1D::Mesh1D(double left, double right, int cells) : a(left), b_end(right), n_cells(cells) {
  if (!(b_end > a)) throw Error(Errc::InvalidConfig, "mesh requires b_end > a");
  if (n_cells < 4) throw Error(Errc::InvalidConfig, "mesh requires n_cells >= 4");
}

GridFunction::GridFunction(const Mesh1D& mesh)
    : mesh_(mesh), values_(static_cast<size_t>(mesh.interior_count()), 0.0) {}

GridFunction::GridFunction(const Mesh1D& mesh, std::vector<double> values)
    : mesh_(mesh), values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != mesh_.interior_count())
    throw Error(Errc::DimensionMismatch, "grid function length != interior node count");
  require_finite(values_, "grid function holds a non-finite value");
}

GridFunction GridFunction::sample(const Mesh1D& mesh, const std::function<double(double)>& f) {
  GridFunction u(mesh);
  for (int i = 0; i < u.size(); ++i) u[i] = f(u.x(i));
  require_finite(u.values(), "sampled grid function is non-finite");
  return u;
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
  require_same_mesh(mesh_, o.mesh_);
  for (size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
  require_same_mesh(mesh_, o.mesh_);
  for (size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

GridFunction& GridFunction::operator*=(double c) {
  for (double& v : values_) v *= c;
  return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(double c, GridFunction a) { return a *= c; }

NodeField::NodeField(const Mesh1D& mesh)
    : mesh_(mesh), values_(static_cast<size_t>(mesh.n_cells + 1), 0.0) {}

NodeField::NodeField(const Mesh1D& mesh, std::vector<double> values)
    : mesh_(mesh), values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != mesh_.n_cells + 1)
    throw Error(Errc::DimensionMismatch, "node field length != node count");
  require_finite(values_, "node field holds a non-finite value");
}

NodeField NodeField::sample(const Mesh1D& mesh, const std::function<double(double)>& f) {
  NodeField v(mesh);
  for (int i = 0; i < v.size(); ++i) v[i] = f(v.x(i));
  require_finite(v.values(), "sampled node field is non-finite");
  return v;
}

NodeField& NodeField::operator+=(const NodeField& o) {
  require_same_mesh(mesh_, o.mesh_);
  for (size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

NodeField& NodeField::operator-=(const NodeField& o) {
  require_same_mesh(mesh_, o.mesh_);
  for (size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

NodeField& NodeField::operator*=(double c) {
  for (double& v : values_) v *= c;
  return *this;
}

NodeField operator+(NodeField a, const NodeField& b) { return a += b; }
NodeField operator-(NodeField a, const NodeField& b) { return a -= b; }
NodeField operator*(double c, NodeField a) { return a *= c; }

TimeGrid::TimeGrid(double horizon, int steps) : T(horizon), n_steps(steps) {
  if (!(T > 0.0)) throw Error(Errc::InvalidConfig, "time grid requires T > 0");
  if (n_steps < 1) throw Error(Errc::InvalidConfig, "time grid requires n_steps >= 1");
}

GridFunction SpaceTimeSeries::at_time(double t) const {
  const double dt = time_grid.dt();
  double s = std::clamp(t, 0.0, time_grid.T);
  int j = std::min(static_cast<int>(s / dt), time_grid.n_steps - 1);
  double w = (s - time_grid.node(j)) / dt;
  GridFunction out = frames[j];
  out *= (1.0 - w);
  GridFunction hi = frames[j + 1];
  hi *= w;
  out += hi;
  return out;
}

double norm_h0(const GridFunction& u) {
  double s = 0.0;
  for (double v : u.values()) s += v * v;
  return std::sqrt(u.mesh().h() * s);
}

double norm_h0(const NodeField& v) {
  const auto vals = v.values();
  double s = 0.5 * (vals.front() * vals.front() + vals.back() * vals.back());
  for (size_t i = 1; i + 1 < vals.size(); ++i) s += vals[i] * vals[i];
  return std::sqrt(v.mesh().h() * s);
}

double inner_h0(const GridFunction& u, const GridFunction& v) {
  require_same_mesh(u.mesh(), v.mesh());
  double s = 0.0;
  for (int i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return u.mesh().h() * s;
}

NodeField node_gradient(const GridFunction& u) {
  const Mesh1D& mesh = u.mesh();
  const double h = mesh.h();
  const int n = mesh.n_cells;
  NodeField g(mesh);
  auto at = [&](int node) -> double {
    return (node >= 1 && node <= n - 1) ? u[node - 1] : 0.0;
  };
  g[0] = (at(1) - 0.0) / h;
  for (int node = 1; node <= n - 1; ++node) g[node] = (at(node + 1) - at(node - 1)) / (2.0 * h);
  g[n] = (0.0 - at(n - 1)) / h;
  return g;
}

double norm_h1(const GridFunction& u) {
  const double l2 = norm_h0(u);
  const double g = norm_h0(node_gradient(u));
  return std::sqrt(l2 * l2 + g * g);
}

namespace {

// Thomas algorithm for the fixed SPD system (-Lap_h + I) w = phi.
std::vector<double> riesz_solve(const GridFunction& phi) {
  const int n = phi.size();
  const double h = phi.mesh().h();
  const double off = -1.0 / (h * h);
  const double diag = 2.0 / (h * h) + 1.0;
  std::vector<double> c(n, 0.0), w(n, 0.0);
  double beta = diag;
  w[0] = phi[0] / beta;
  for (int i = 1; i < n; ++i) {
    c[i - 1] = off / beta;
    beta = diag - off * c[i - 1];
    w[i] = (phi[i] - off * w[i - 1]) / beta;
  }
  for (int i = n - 2; i >= 0; --i) w[i] -= c[i] * w[i + 1];
  return w;
}

}  // namespace

double norm_hminus1(const GridFunction& phi) {
  if (phi.size() == 0) return 0.0;
  std::vector<double> w = riesz_solve(phi);
  double s = 0.0;
  for (int i = 0; i < phi.size(); ++i) s += phi[i] * w[i];
  s *= phi.mesh().h();
  if (!std::isfinite(s)) throw Error(Errc::LinearSolveFailure, "Riesz solve produced non-finite values");
  // Round-off can nudge the quadratic form below zero for tiny phi.
  return std::sqrt(std::max(s, 0.0));
}

double weighted_inner_binv(const NodeField& F, const NodeField& b_slice) {
  require_same_mesh(F.mesh(), b_slice.mesh());
  const int n = F.size();
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    if (!(b_slice[i] > 0.0))
      throw Error(Errc::NonCoercive, "b <= 0 at x = " + std::to_string(F.x(i)));
    double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    s += w * F[i] * F[i] / b_slice[i];
  }
  return F.mesh().h() * s;
}

double time_integral(std::span<const double> g, const TimeGrid& tg, double K) {
  if (static_cast<int>(g.size()) != tg.n_nodes())
    throw Error(Errc::DimensionMismatch, "sequence length != time node count");
  double s = 0.0;
  for (int j = 0; j <= tg.n_steps; ++j) {
    double w = (j == 0 || j == tg.n_steps) ? 0.5 : 1.0;
    s += w * std::exp(-2.0 * K * tg.node(j)) * g[j];
  }
  return tg.dt() * s;
}

std::vector<double> time_integral_prefix(std::span<const double> g, const TimeGrid& tg,
                                         double K) {
  if (static_cast<int>(g.size()) != tg.n_nodes())
    throw Error(Errc::DimensionMismatch, "sequence length != time node count");
  std::vector<double> out(g.size(), 0.0);
  double acc = 0.0;
  double prev = g[0];
  for (int j = 1; j <= tg.n_steps; ++j) {
    double cur = std::exp(-2.0 * K * tg.node(j)) * g[j];
    acc += 0.5 * tg.dt() * (prev + cur);
    out[j] = acc;
    prev = cur;
  }
  return out;
}

std::vector<double> cell_gradient(const GridFunction& u) {
  const Mesh1D& mesh = u.mesh();
  const double h = mesh.h();
  const int n = mesh.n_cells;
  std::vector<double> g(n, 0.0);
  auto at = [&](int node) -> double {
    return (node >= 1 && node <= n - 1) ? u[node - 1] : 0.0;
  };
  for (int c = 0; c < n; ++c) g[c] = (at(c + 1) - at(c)) / h;
  return g;
}

std::vector<double> midpoint_average(const NodeField& F) {
  const int n = F.mesh().n_cells;
  std::vector<double> m(n, 0.0);
  for (int c = 0; c < n; ++c) m[c] = 0.5 * (F[c] + F[c + 1]);
  return m;
}

double dual_pair_gradient(const GridFunction& u, const NodeField& F) {
  require_same_mesh(u.mesh(), F.mesh());
  std::vector<double> du = cell_gradient(u);
  std::vector<double> fm = midpoint_average(F);
  double s = 0.0;
  for (size_t c = 0; c < du.size(); ++c) s += du[c] * fm[c];
  return u.mesh().h() * s;
}

}  // namespace parest
