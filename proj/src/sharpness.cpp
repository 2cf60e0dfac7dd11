#include "parest/sharpness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace parest {

Mesh1D sharp_mesh(int n_cells) { return Mesh1D(-std::numbers::pi, std::numbers::pi, n_cells); }

CoefficientSet sharp_coefficients() { return CoefficientSet::constants(1.0, 0.0, 0.0, 1.0, 1.0); }

SharpOracle make_case(const SharpCase& c) {
  if (c.m < 1) throw Error(Errc::InvalidConfig, "sharp case requires m >= 1");
  if (c.K < 0.0) throw Error(Errc::InvalidConfig, "sharp case requires K >= 0");
  const double gamma = c.gamma();
  const double T = c.T;
  const int m = c.m;

  SharpOracle oracle;
  oracle.source.F = [m, gamma, T](double x, double t) {
    return -std::cos(m * x) * std::exp(gamma * (t - T));
  };
  oracle.source.F0 = [](double, double) { return 0.0; };
  // m sin(mx) sinh(gamma t) / gamma, carried at the e^{-gamma T} scale.
  oracle.exact = [m, gamma, T](double x, double t) {
    const double scaled_sinh = 0.5 * (std::exp(gamma * (t - T)) - std::exp(-gamma * (t + T)));
    return m * std::sin(m * x) * scaled_sinh / gamma;
  };
  return oracle;
}

double closed_form_ratio(const SharpCase& c) {
  const double gamma = c.gamma();
  return static_cast<double>(c.m) * c.m / (2.0 * gamma) * (-std::expm1(-2.0 * gamma * c.T));
}

SweepRow sweep_one(const SharpCase& c, int n_cells, int n_steps) {
  if (n_cells < 32 * c.m)
    throw Error(Errc::ResolutionTooCoarse,
                "need n_cells >= 32*m = " + std::to_string(32 * c.m) + ", got " +
                    std::to_string(n_cells));
  const Mesh1D mesh = sharp_mesh(n_cells);
  const TimeGrid tg(c.T, n_steps);
  const CoefficientSet coeffs = sharp_coefficients();
  const SharpOracle oracle = make_case(c);

  SpaceTimeSeries u = solve_ibvp(coeffs, oracle.source, mesh, tg, {0.5, c.K});

  std::vector<double> flux_energy(tg.n_nodes(), 0.0);
  for (int j = 0; j < tg.n_nodes(); ++j) {
    NodeField F = sample_nodes(oracle.source.F, mesh, tg.node(j));
    NodeField b_slice = sample_nodes(coeffs.b, mesh, tg.node(j));
    flux_energy[j] = weighted_inner_binv(F, b_slice);
  }
  const double denom = time_integral(flux_energy, tg, 0.0);
  const double nu = norm_h0(u.frames.back());

  SweepRow row;
  row.m = c.m;
  row.K = c.K;
  row.T = c.T;
  row.gamma = c.gamma();
  row.ratio_numeric = nu * nu / denom;
  row.ratio_closed = closed_form_ratio(c);
  row.discrepancy = std::abs(row.ratio_numeric - row.ratio_closed) / row.ratio_closed;
  return row;
}

std::vector<SweepRow> sweep(const std::vector<int>& m_list, double K, double T, int n_cells,
                            int n_steps) {
  if (m_list.empty()) throw Error(Errc::InvalidConfig, "sweep requires a non-empty m list");
  const int m_max = *std::max_element(m_list.begin(), m_list.end());
  if (n_cells < 32 * m_max)
    throw Error(Errc::ResolutionTooCoarse,
                "need n_cells >= 32*max(m) = " + std::to_string(32 * m_max) + ", got " +
                    std::to_string(n_cells));
  std::vector<SweepRow> rows;
  rows.reserve(m_list.size());
  for (int m : m_list) rows.push_back(sweep_one({m, K, T}, n_cells, n_steps));
  return rows;
}

}  // namespace parest
