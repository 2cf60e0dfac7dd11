#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "parest/mesh.hpp"

namespace parest {

using SpaceTimeFn = std::function<double(double x, double t)>;

/// Samplers for b, f, lambda plus the claimed ellipticity constant and the
/// claimed ess-sup of |b| + |f| + |lambda|.
struct CoefficientSet {
  SpaceTimeFn b;
  SpaceTimeFn f;
  SpaceTimeFn lambda;
  double delta = 1.0;
  double sup_bound = 1.0;

  static CoefficientSet constants(double b0, double f0, double lambda0, double delta,
                                  double sup_bound);
  /// The heat-equation baseline: b = 1, f = 0, lambda = 0.
  static CoefficientSet heat();
};

/// The parameter pack the estimates depend on (dimension is fixed to 1).
struct ParamPack {
  double T = 1.0;
  int n = 1;
  double domain_a = 0.0;
  double domain_b = 1.0;
  double delta = 1.0;
  double sup_bound = 1.0;
};

ParamPack param_pack(const CoefficientSet& coeffs, const Mesh1D& mesh, const TimeGrid& tg);

/// Dual-space source phi = div F + F0 given through its representation pair.
struct SourceTerm {
  SpaceTimeFn F;
  SpaceTimeFn F0;

  static SourceTerm zero();
};

struct ValidationIssue {
  Errc code;
  double x = 0.0;
  double t = 0.0;
  std::string message;
};

struct ValidationReport {
  bool pass = true;
  double min_b = 0.0;
  double max_sum = 0.0;  // max over probes of |b| + |f| + |lambda|
  std::optional<ValidationIssue> issue;
};

/// Probes every space-time node and every (cell midpoint, time node) pair.
/// Passes iff min b >= delta and |b|+|f|+|lambda| <= sup_bound throughout.
ValidationReport validate(const CoefficientSet& coeffs, const Mesh1D& mesh, const TimeGrid& tg);

/// Nodal samples of F(.,t) and F0(.,t), boundary nodes included.
std::pair<NodeField, NodeField> sample_source(const SourceTerm& src, const Mesh1D& mesh,
                                              double t);

NodeField sample_nodes(const SpaceTimeFn& f, const Mesh1D& mesh, double t);
GridFunction sample_interior(const SpaceTimeFn& f, const Mesh1D& mesh, double t);

// --- Tabulated fields (CSV interchange) ------------------------------------

/// Loads `x,t,b,f,lambda` rows (row-major over time then space) into a
/// coefficient set that interpolates bilinearly between table nodes.
CoefficientSet load_coefficient_table(const std::string& path, double delta, double sup_bound);

/// Loads `x,t,F,F0` rows into a source term with bilinear interpolation.
SourceTerm load_source_table(const std::string& path);

}  // namespace parest
