#include "parest/picard.hpp"

#include <cmath>

namespace parest {

namespace {

std::vector<SourceFrame> shifted_forcing(const SourceTerm& phi, const Mesh1D& mesh,
                                         const TimeGrid& tg, double K) {
  std::vector<SourceFrame> frames;
  frames.reserve(tg.n_nodes());
  for (int j = 0; j < tg.n_nodes(); ++j) {
    const double t = tg.node(j);
    const double damp = std::exp(-K * t);
    NodeField F = sample_nodes(phi.F, mesh, t);
    GridFunction F0 = sample_interior(phi.F0, mesh, t);
    F *= damp;
    F0 *= damp;
    frames.emplace_back(std::move(F), std::move(F0));
  }
  return frames;
}

double mode_norm(std::span<const SourceFrame> frames, const TimeGrid& tg, PicardNormMode mode) {
  std::vector<double> g(frames.size(), 0.0);
  for (size_t j = 0; j < frames.size(); ++j) {
    GridFunction phi = frames[j].assembled();
    const double n = mode == PicardNormMode::Xminus1 ? norm_hminus1(phi) : norm_h0(phi);
    g[j] = n * n;
  }
  return std::sqrt(time_integral(g, tg, 0.0));
}

std::vector<SourceFrame> frame_diff(std::span<const SourceFrame> a,
                                    std::span<const SourceFrame> b) {
  std::vector<SourceFrame> out;
  out.reserve(a.size());
  for (size_t j = 0; j < a.size(); ++j)
    out.emplace_back(a[j].flux - b[j].flux, a[j].plain - b[j].plain);
  return out;
}

}  // namespace

PicardResult solve_nonlinear(const CoefficientSet& coeffs, const NonlocalSpec& spec,
                             const SourceTerm& phi, const Mesh1D& mesh, const TimeGrid& tg,
                             const PicardConfig& cfg) {
  if (cfg.max_iters < 1) throw Error(Errc::InvalidConfig, "picard requires max_iters >= 1");
  if (!(cfg.tol > 0.0)) throw Error(Errc::InvalidConfig, "picard requires tol > 0");
  validate_nonlocal(spec, mesh, tg);

  PicardTrace trace;
  double K = cfg.K;
  std::vector<SourceFrame> phi_K = shifted_forcing(phi, mesh, tg, K);
  std::vector<SourceFrame> g = phi_K;
  SpaceTimeSeries w;

  int stalled = 0;
  double prev_residual = -1.0;

  while (trace.iterations < cfg.max_iters) {
    w = solve_ibvp_frames(coeffs, g, mesh, tg, {cfg.theta, K});
    std::vector<SourceFrame> b = apply_series(spec, K, w);
    std::vector<SourceFrame> g_next;
    g_next.reserve(g.size());
    for (size_t j = 0; j < g.size(); ++j)
      g_next.emplace_back(phi_K[j].flux + b[j].flux, phi_K[j].plain + b[j].plain);

    const double residual = mode_norm(frame_diff(g_next, g), tg, cfg.norm_mode);
    const double scale = mode_norm(g_next, tg, cfg.norm_mode);
    ++trace.iterations;
    trace.residuals.push_back(residual);
    trace.K_used.push_back(K);
    trace.quotients.push_back(prev_residual > 0.0 ? residual / prev_residual : 0.0);
    prev_residual = residual;

    if (residual <= cfg.tol * std::max(scale, 1e-300)) {
      trace.converged = true;
      trace.K_final = K;
      // w already solves the scheme for g; one more solve pins it to g_next.
      w = solve_ibvp_frames(coeffs, g_next, mesh, tg, {cfg.theta, K});
      g = std::move(g_next);
      break;
    }

    if (!trace.quotients.empty() && trace.quotients.back() > 0.95)
      ++stalled;
    else
      stalled = 0;

    if (stalled >= 5) {
      const double K_next = (K == 0.0) ? 1.0 : 2.0 * K;
      if (K_next > cfg.K_max || K_next * tg.T > 700.0)
        throw Error(Errc::NoContraction,
                    "quotients stalled above 0.95 up to the shift cap (K = " +
                        std::to_string(K) + ")");
      K = K_next;
      phi_K = shifted_forcing(phi, mesh, tg, K);
      g = phi_K;
      stalled = 0;
      prev_residual = -1.0;
      continue;
    }

    g = std::move(g_next);
  }

  if (!trace.converged) {
    if (!trace.quotients.empty() && trace.quotients.back() >= 1.0)
      throw Error(Errc::NoContraction, "iteration diverges (last quotient >= 1)");
    throw Error(Errc::MaxItersExceeded,
                "no convergence to tol within " + std::to_string(cfg.max_iters) + " iterations");
  }

  PicardResult result;
  result.trace = std::move(trace);
  result.u.time_grid = tg;
  result.u.frames.reserve(tg.n_nodes());
  for (int j = 0; j < tg.n_nodes(); ++j) {
    GridFunction frame = w.frames[j];
    frame *= std::exp(result.trace.K_final * tg.node(j));
    result.u.frames.push_back(std::move(frame));
  }
  return result;
}

std::vector<SourceFrame> realized_source(const SpaceTimeSeries& u, const NonlocalSpec& spec,
                                         const SourceTerm& phi) {
  const Mesh1D& mesh = u.mesh();
  const TimeGrid& tg = u.time_grid;
  std::vector<SourceFrame> total;
  total.reserve(tg.n_nodes());
  for (int j = 0; j < tg.n_nodes(); ++j) {
    const double t = tg.node(j);
    SourceFrame b = apply(spec, u, t);
    NodeField F = sample_nodes(phi.F, mesh, t);
    GridFunction F0 = sample_interior(phi.F0, mesh, t);
    total.emplace_back(F + b.flux, F0 + b.plain);
  }
  return total;
}

EstimateReport verify_nonlocal_estimate(const SpaceTimeSeries& u, const NonlocalSpec& spec,
                                        const SourceTerm& phi, const CoefficientSet& coeffs,
                                        double M, double epsilon, double theta, double K_max) {
  std::vector<SourceFrame> frames = realized_source(u, spec, phi);
  const Mesh1D& mesh = u.mesh();
  const TimeGrid& tg = u.time_grid;
  KSearchResult found = search_K_frames(coeffs, frames, mesh, tg, theta, M, epsilon, K_max);
  if (!found.found)
    throw Error(Errc::NotFound,
                "no shift <= " + std::to_string(K_max) + " passes for the frozen source");
  SpaceTimeSeries u_frozen = solve_ibvp_frames(coeffs, frames, mesh, tg, {theta, found.K});
  return check_inequality_frames(u_frozen, frames, coeffs, found.K, M, epsilon);
}

}  // namespace parest
