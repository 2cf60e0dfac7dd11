#include "parest/estimate.hpp"

#include <algorithm>
#include <cmath>

namespace parest {

namespace {

double ratio_of(double lhs, double denom) {
  if (denom <= 0.0) return lhs <= 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return lhs / denom;
}

}  // namespace

std::vector<double> lhs_energy(const SpaceTimeSeries& u, double K, double M) {
  const TimeGrid& tg = u.time_grid;
  std::vector<double> weighted(tg.n_nodes(), 0.0);
  for (int j = 0; j < tg.n_nodes(); ++j) {
    const double nj = norm_h0(u.frames[j]);
    weighted[j] = std::exp(-2.0 * K * tg.node(j)) * nj * nj;
  }
  std::vector<double> out(tg.n_nodes(), 0.0);
  double running_sup = 0.0;
  double acc = 0.0;
  for (int j = 0; j < tg.n_nodes(); ++j) {
    running_sup = std::max(running_sup, weighted[j]);
    if (j > 0) acc += 0.5 * tg.dt() * (weighted[j - 1] + weighted[j]);
    out[j] = running_sup + M * acc;
  }
  return out;
}

std::pair<std::vector<double>, std::vector<double>> rhs_source(const SourceTerm& src,
                                                               const CoefficientSet& coeffs,
                                                               const Mesh1D& mesh,
                                                               const TimeGrid& tg, double K) {
  std::vector<double> gF(tg.n_nodes(), 0.0), gF0(tg.n_nodes(), 0.0);
  for (int j = 0; j < tg.n_nodes(); ++j) {
    const double t = tg.node(j);
    auto [F, F0] = sample_source(src, mesh, t);
    NodeField b_slice = sample_nodes(coeffs.b, mesh, t);
    gF[j] = weighted_inner_binv(F, b_slice);
    const double n0 = norm_h0(F0);
    gF0[j] = n0 * n0;
  }
  return {time_integral_prefix(gF, tg, K), time_integral_prefix(gF0, tg, K)};
}

namespace {

EstimateReport finish_report(const SpaceTimeSeries& u, std::vector<double> rhs_F,
                             std::vector<double> rhs_F0, double K, double M, double epsilon) {
  const TimeGrid& tg = u.time_grid;
  EstimateReport rep;
  rep.K = K;
  rep.M = M;
  rep.epsilon = epsilon;
  rep.lhs = lhs_energy(u, K, M);
  rep.rhs_F = std::move(rhs_F);
  rep.rhs_F0 = std::move(rhs_F0);
  rep.t.resize(tg.n_nodes());
  rep.ratio.resize(tg.n_nodes());
  rep.max_ratio = 0.0;
  for (int j = 0; j < tg.n_nodes(); ++j) {
    rep.t[j] = tg.node(j);
    const double denom = (0.5 + epsilon) * rep.rhs_F[j] + epsilon * rep.rhs_F0[j];
    rep.ratio[j] = ratio_of(rep.lhs[j], denom);
    rep.max_ratio = std::max(rep.max_ratio, rep.ratio[j]);
  }
  rep.pass = rep.max_ratio <= 1.0 + kRatioTolerance;
  return rep;
}

}  // namespace

EstimateReport check_inequality(const SpaceTimeSeries& u, const SourceTerm& src,
                                const CoefficientSet& coeffs, double K, double M,
                                double epsilon) {
  auto [rF, rF0] = rhs_source(src, coeffs, u.mesh(), u.time_grid, K);
  return finish_report(u, std::move(rF), std::move(rF0), K, M, epsilon);
}

std::pair<std::vector<double>, std::vector<double>> rhs_source_frames(
    std::span<const SourceFrame> frames, const CoefficientSet& coeffs, const Mesh1D& mesh,
    const TimeGrid& tg, double K) {
  if (static_cast<int>(frames.size()) != tg.n_nodes())
    throw Error(Errc::DimensionMismatch, "source frame count != time node count");
  std::vector<double> gF(tg.n_nodes(), 0.0), gF0(tg.n_nodes(), 0.0);
  for (int j = 0; j < tg.n_nodes(); ++j) {
    NodeField b_slice = sample_nodes(coeffs.b, mesh, tg.node(j));
    gF[j] = weighted_inner_binv(frames[j].flux, b_slice);
    const double n0 = norm_h0(frames[j].plain);
    gF0[j] = n0 * n0;
  }
  return {time_integral_prefix(gF, tg, K), time_integral_prefix(gF0, tg, K)};
}

EstimateReport check_inequality_frames(const SpaceTimeSeries& u,
                                       std::span<const SourceFrame> frames,
                                       const CoefficientSet& coeffs, double K, double M,
                                       double epsilon) {
  auto [rF, rF0] = rhs_source_frames(frames, coeffs, u.mesh(), u.time_grid, K);
  return finish_report(u, std::move(rF), std::move(rF0), K, M, epsilon);
}

namespace {

KSearchResult bracket_and_bisect(const std::function<bool(double)>& passes, double K_max) {
  if (K_max < 0.0) throw Error(Errc::InvalidConfig, "search_K requires K_max >= 0");
  KSearchResult res;
  auto probe = [&](double K) {
    bool ok = passes(K);
    res.tested.emplace_back(K, ok);
    return ok;
  };

  if (probe(0.0)) {
    res.found = true;
    res.K = 0.0;
    return res;
  }
  if (K_max == 0.0) return res;  // empty search range above zero

  double lo = 0.0;   // largest failing shift seen
  double hi = -1.0;  // smallest passing shift seen
  double K = std::min(1.0, K_max);
  while (true) {
    if (probe(K)) {
      hi = K;
      break;
    }
    lo = K;
    if (K >= K_max) break;
    K = std::min(K * 2.0, K_max);
  }
  if (hi < 0.0) return res;  // nothing passed up to K_max

  for (int it = 0; it < 10 && (hi - lo) > 0.01 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (probe(mid))
      hi = mid;
    else
      lo = mid;
  }
  res.found = true;
  res.K = hi;
  return res;
}

}  // namespace

KSearchResult search_K(const CoefficientSet& coeffs, const std::vector<SourceTerm>& family,
                       const Mesh1D& mesh, const TimeGrid& tg, double theta, double M,
                       double epsilon, double K_max) {
  return bracket_and_bisect(
      [&](double K) {
        for (const SourceTerm& src : family) {
          SpaceTimeSeries u = solve_ibvp(coeffs, src, mesh, tg, {theta, K});
          if (!check_inequality(u, src, coeffs, K, M, epsilon).pass) return false;
        }
        return true;
      },
      K_max);
}

KSearchResult search_K_frames(const CoefficientSet& coeffs, std::span<const SourceFrame> frames,
                              const Mesh1D& mesh, const TimeGrid& tg, double theta, double M,
                              double epsilon, double K_max) {
  return bracket_and_bisect(
      [&](double K) {
        SpaceTimeSeries u = solve_ibvp_frames(coeffs, frames, mesh, tg, {theta, K});
        return check_inequality_frames(u, frames, coeffs, K, M, epsilon).pass;
      },
      K_max);
}

std::vector<RatioPoint> initial_time_ratio(const SpaceTimeSeries& u, const SourceTerm& src,
                                           const CoefficientSet& coeffs, SourceKind kind) {
  const TimeGrid& tg = u.time_grid;
  const Mesh1D& mesh = u.mesh();

  // Density of the normalizing integral at the time nodes.
  std::vector<double> g(tg.n_nodes(), 0.0);
  for (int j = 0; j < tg.n_nodes(); ++j) {
    const double t = tg.node(j);
    if (kind == SourceKind::HminusSource) {
      NodeField F = sample_nodes(src.F, mesh, t);
      NodeField b_slice = sample_nodes(coeffs.b, mesh, t);
      g[j] = weighted_inner_binv(F, b_slice);
    } else {
      auto [F, F0] = sample_source(src, mesh, t);
      const double n = norm_h0(apply_source_weak(F, F0));
      g[j] = n * n;
    }
  }
  const double denom0 = g[0];
  if (!(denom0 > 0.0))
    throw Error(Errc::ZeroDenominator, "source weighted norm vanishes at t = 0");

  std::vector<double> prefix = time_integral_prefix(g, tg, 0.0);
  auto prefix_at = [&](double t) {
    const double dt = tg.dt();
    int j = std::min(static_cast<int>(t / dt), tg.n_steps - 1);
    double w = (t - tg.node(j)) / dt;
    return (1.0 - w) * prefix[j] + w * prefix[j + 1];
  };

  std::vector<RatioPoint> out;
  const double dt = tg.dt();
  for (double t = tg.T / 2.0; t >= 2.0 * dt * (1.0 - 1e-12); t /= 2.0) {
    RatioPoint p;
    p.t = t;
    const double nu = norm_h0(u.at_time(t));
    p.ratio = ratio_of(nu * nu, prefix_at(t));
    p.trusted = t >= 8.0 * dt * (1.0 - 1e-12);
    p.running_mean_dev = std::abs(prefix_at(t) / (t * denom0) - 1.0);
    out.push_back(p);
  }
  return out;
}

}  // namespace parest
