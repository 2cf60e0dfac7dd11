#pragma once

#include <vector>

#include "parest/estimate.hpp"

namespace parest {

/// One member of the closed-form family on (-pi, pi) with b = 1, f = 0,
/// lambda = 0: source flux F(x,t) = -cos(m x) e^{gamma t}, gamma = m^2 + K.
struct SharpCase {
  int m = 1;
  double K = 0.0;
  double T = 1.0;

  double gamma() const { return static_cast<double>(m) * m + K; }
};

/// The case's source and exact solution. Both carry the common factor
/// e^{-gamma T} so that no intermediate value overflows; every ratio of
/// interest is invariant under that scaling.
struct SharpOracle {
  SourceTerm source;
  SpaceTimeFn exact;  // u(x, t), same normalization as the source
};

SharpOracle make_case(const SharpCase& c);

/// m^2 / (2 gamma) * (1 - e^{-2 gamma T}); strictly below 1/2, increasing in
/// gamma * T.
double closed_form_ratio(const SharpCase& c);

struct SweepRow {
  int m = 0;
  double K = 0.0;
  double T = 0.0;
  double gamma = 0.0;
  double ratio_numeric = 0.0;
  double ratio_closed = 0.0;
  double discrepancy = 0.0;  // |numeric - closed| / closed
};

Mesh1D sharp_mesh(int n_cells);
CoefficientSet sharp_coefficients();

/// ||u(.,T)||^2 / int_0^T (F, b^{-1} F) computed with the theta scheme.
SweepRow sweep_one(const SharpCase& c, int n_cells, int n_steps);

/// Requires n_cells >= 32 * max(m_list) (ResolutionTooCoarse otherwise).
std::vector<SweepRow> sweep(const std::vector<int>& m_list, double K, double T, int n_cells,
                            int n_steps);

}  // namespace parest
