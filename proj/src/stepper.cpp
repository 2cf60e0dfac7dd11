#include "parest/stepper.hpp"

#include <cmath>
#include <iostream>

namespace parest {

std::vector<double> TridiagonalOperator::apply(std::span<const double> u) const {
  const int n = size();
  std::vector<double> out(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double v = diag[i] * u[i];
    if (i > 0) v += lower[i] * u[i - 1];
    if (i + 1 < n) v += upper[i] * u[i + 1];
    out[i] = v;
  }
  return out;
}

TridiagonalOperator assemble(const CoefficientSet& coeffs, const Mesh1D& mesh, double t,
                             double K) {
  const int n = mesh.interior_count();
  const double h = mesh.h();
  const double h2 = h * h;
  TridiagonalOperator op;
  op.lower.assign(n, 0.0);
  op.diag.assign(n, 0.0);
  op.upper.assign(n, 0.0);

  // b at cell midpoints; cell c sits between nodes c and c+1.
  std::vector<double> bm(mesh.n_cells, 0.0);
  for (int c = 0; c < mesh.n_cells; ++c) {
    bm[c] = coeffs.b(mesh.midpoint(c), t);
    if (!std::isfinite(bm[c]))
      throw Error(Errc::NonFiniteSample, "b non-finite at a cell midpoint");
    if (!(bm[c] > 0.0))
      throw Error(Errc::NonCoercive,
                  "b <= 0 at x = " + std::to_string(mesh.midpoint(c)) + ", t = " + std::to_string(t));
  }

  for (int i = 0; i < n; ++i) {
    const double x = mesh.node(i + 1);
    const double fv = coeffs.f(x, t);
    const double lv = coeffs.lambda(x, t);
    if (!std::isfinite(fv) || !std::isfinite(lv))
      throw Error(Errc::NonFiniteSample, "coefficient non-finite at an interior node");
    const double bl = bm[i];      // midpoint left of node i+1
    const double br = bm[i + 1];  // midpoint right of node i+1
    op.lower[i] = bl / h2 - fv / (2.0 * h);
    op.diag[i] = -(bl + br) / h2 + lv - K;
    op.upper[i] = br / h2 + fv / (2.0 * h);
  }
  return op;
}

GridFunction apply_source_weak(const NodeField& F, const NodeField& F0) {
  if (!(F.mesh() == F0.mesh()))
    throw Error(Errc::MeshMismatch, "source components live on different meshes");
  const Mesh1D& mesh = F.mesh();
  const double h = mesh.h();
  std::vector<double> fm = midpoint_average(F);
  GridFunction phi(mesh);
  for (int i = 0; i < phi.size(); ++i) {
    // node i+1 sits between cells i and i+1
    phi[i] = (fm[i + 1] - fm[i]) / h + F0[i + 1];
  }
  return phi;
}

GridFunction SourceFrame::assembled() const {
  NodeField f0(flux.mesh());
  for (int i = 0; i < plain.size(); ++i) f0[i + 1] = plain[i];
  return apply_source_weak(flux, f0);
}

std::vector<double> solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                      std::span<const double> upper, std::span<const double> rhs) {
  const int n = static_cast<int>(diag.size());
  std::vector<double> c(n, 0.0), x(n, 0.0);
  double beta = diag[0];
  if (beta == 0.0) throw Error(Errc::LinearSolveFailure, "zero pivot in tridiagonal solve");
  x[0] = rhs[0] / beta;
  for (int i = 1; i < n; ++i) {
    c[i - 1] = upper[i - 1] / beta;
    beta = diag[i] - lower[i] * c[i - 1];
    if (beta == 0.0) throw Error(Errc::LinearSolveFailure, "zero pivot in tridiagonal solve");
    x[i] = (rhs[i] - lower[i] * x[i - 1]) / beta;
  }
  for (int i = n - 2; i >= 0; --i) x[i] -= c[i] * x[i + 1];
  for (double v : x)
    if (!std::isfinite(v))
      throw Error(Errc::LinearSolveFailure, "tridiagonal solve produced non-finite values");
  return x;
}

namespace {

SpaceTimeSeries run_theta_scheme(const CoefficientSet& coeffs,
                                 const std::function<GridFunction(int)>& source_at_node,
                                 const Mesh1D& mesh, const TimeGrid& tg,
                                 const ThetaSchemeConfig& cfg) {
  if (!(cfg.theta >= 0.5 && cfg.theta <= 1.0))
    throw Error(Errc::InvalidConfig, "theta must lie in [1/2, 1]");
  if (cfg.K < 0.0) throw Error(Errc::InvalidConfig, "shift K must be >= 0");

  const int n = mesh.interior_count();
  const double dt = tg.dt();
  const double theta = cfg.theta;

  SpaceTimeSeries series;
  series.time_grid = tg;
  series.frames.reserve(tg.n_nodes());
  series.frames.emplace_back(mesh);  // u(.,0) = 0

  TridiagonalOperator L_prev = assemble(coeffs, mesh, tg.node(0), cfg.K);
  GridFunction phi_prev = source_at_node(0);

  {
    double max_reaction = 0.0;
    for (double d : L_prev.diag) max_reaction = std::max(max_reaction, std::abs(d));
    // Diagonal dominance of the diffusion part keeps this meaningful only for
    // the zero-order excess; warn when dt * sup|lambda - K| is large.
    double sup_zero = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = mesh.node(i + 1);
      sup_zero = std::max(sup_zero, std::abs(coeffs.lambda(x, tg.node(0)) - cfg.K));
    }
    if (dt * sup_zero > 2.0)
      std::cerr << "parest: warning: dt * sup|lambda - K| = " << dt * sup_zero
                << " > 2; accuracy may degrade\n";
  }

  std::vector<double> rhs(n, 0.0);
  for (int j = 0; j < tg.n_steps; ++j) {
    TridiagonalOperator L_next = assemble(coeffs, mesh, tg.node(j + 1), cfg.K);
    GridFunction phi_next = source_at_node(j + 1);

    const GridFunction& uj = series.frames.back();
    std::vector<double> Lu = L_prev.apply(uj.values());
    for (int i = 0; i < n; ++i) {
      const double phi_bar = theta * phi_next[i] + (1.0 - theta) * phi_prev[i];
      rhs[i] = uj[i] + (1.0 - theta) * dt * Lu[i] + dt * phi_bar;
    }

    std::vector<double> lo(n), di(n), up(n);
    for (int i = 0; i < n; ++i) {
      lo[i] = -theta * dt * L_next.lower[i];
      di[i] = 1.0 - theta * dt * L_next.diag[i];
      up[i] = -theta * dt * L_next.upper[i];
    }
    series.frames.emplace_back(mesh, solve_tridiagonal(lo, di, up, rhs));

    L_prev = std::move(L_next);
    phi_prev = std::move(phi_next);
  }
  return series;
}

}  // namespace

SpaceTimeSeries solve_ibvp(const CoefficientSet& coeffs, const SourceTerm& src,
                           const Mesh1D& mesh, const TimeGrid& tg, const ThetaSchemeConfig& cfg) {
  auto source_at_node = [&](int j) {
    auto [F, F0] = sample_source(src, mesh, tg.node(j));
    return apply_source_weak(F, F0);
  };
  return run_theta_scheme(coeffs, source_at_node, mesh, tg, cfg);
}

SpaceTimeSeries solve_ibvp_frames(const CoefficientSet& coeffs,
                                  std::span<const SourceFrame> frames, const Mesh1D& mesh,
                                  const TimeGrid& tg, const ThetaSchemeConfig& cfg) {
  if (static_cast<int>(frames.size()) != tg.n_nodes())
    throw Error(Errc::DimensionMismatch, "source frame count != time node count");
  auto source_at_node = [&](int j) { return frames[j].assembled(); };
  return run_theta_scheme(coeffs, source_at_node, mesh, tg, cfg);
}

double scheme_residual(const SpaceTimeSeries& u, const CoefficientSet& coeffs,
                       std::span<const SourceFrame> frames, const ThetaSchemeConfig& cfg) {
  const Mesh1D& mesh = u.mesh();
  const TimeGrid& tg = u.time_grid;
  if (static_cast<int>(frames.size()) != tg.n_nodes())
    throw Error(Errc::DimensionMismatch, "source frame count != time node count");
  const double dt = tg.dt();
  const double theta = cfg.theta;
  const int n = mesh.interior_count();

  double worst = 0.0;
  TridiagonalOperator L_prev = assemble(coeffs, mesh, tg.node(0), cfg.K);
  GridFunction phi_prev = frames[0].assembled();
  for (int j = 0; j < tg.n_steps; ++j) {
    TridiagonalOperator L_next = assemble(coeffs, mesh, tg.node(j + 1), cfg.K);
    GridFunction phi_next = frames[j + 1].assembled();
    std::vector<double> Lu0 = L_prev.apply(u.frames[j].values());
    std::vector<double> Lu1 = L_next.apply(u.frames[j + 1].values());
    double local = 0.0;
    for (int i = 0; i < n; ++i) {
      const double phi_bar = theta * phi_next[i] + (1.0 - theta) * phi_prev[i];
      const double defect = u.frames[j + 1][i] - u.frames[j][i] -
                            dt * (theta * Lu1[i] + (1.0 - theta) * Lu0[i]) - dt * phi_bar;
      local = std::max(local, std::abs(defect));
    }
    worst = std::max(worst, local);
    L_prev = std::move(L_next);
    phi_prev = std::move(phi_next);
  }
  return worst;
}

}  // namespace parest
