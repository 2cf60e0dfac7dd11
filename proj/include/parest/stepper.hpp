#pragma once

#include <span>
#include <vector>

#include "parest/problem.hpp"

namespace parest {

/// theta = 1/2 is Crank-Nicolson, theta = 1 implicit Euler; K is the
/// exponential-shift rate entering the operator as -K*u.
struct ThetaSchemeConfig {
  double theta = 0.5;
  double K = 0.0;
};

/// Tridiagonal bands of A_h - K*I over the interior nodes. lower[i] couples
/// node i to node i-1 (lower[0] unused), upper[i] to node i+1 (last unused).
struct TridiagonalOperator {
  std::vector<double> lower;
  std::vector<double> diag;
  std::vector<double> upper;

  int size() const { return static_cast<int>(diag.size()); }
  std::vector<double> apply(std::span<const double> u) const;
};

/// Flux-form assembly: diffusion uses b at cell midpoints, the drift term
/// centered differences, the diagonal holds lambda - K.
TridiagonalOperator assemble(const CoefficientSet& coeffs, const Mesh1D& mesh, double t,
                             double K);

/// phi = div_h F + F0 with flux differencing of midpoint-averaged F. Mirrors
/// the assembled diffusion stencil so (u, div_h F) = -(grad_h u, F) exactly.
GridFunction apply_source_weak(const NodeField& F, const NodeField& F0);

/// Thomas solve of the tridiagonal system; throws LinearSolveFailure on a
/// vanishing pivot or non-finite result.
std::vector<double> solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                      std::span<const double> upper, std::span<const double> rhs);

/// One H^{-1}-represented source frame: a flux component routed through
/// apply_source_weak and a plain zero-order component.
struct SourceFrame {
  NodeField flux;
  GridFunction plain;

  SourceFrame() = default;
  SourceFrame(NodeField f, GridFunction p) : flux(std::move(f)), plain(std::move(p)) {}
  explicit SourceFrame(const Mesh1D& mesh) : flux(mesh), plain(mesh) {}

  GridFunction assembled() const;
};

/// Theta-scheme integration of du/dt = A u - K u + phi with zero initial and
/// boundary data; phi is sampled from the source term at the time nodes.
SpaceTimeSeries solve_ibvp(const CoefficientSet& coeffs, const SourceTerm& src,
                           const Mesh1D& mesh, const TimeGrid& tg, const ThetaSchemeConfig& cfg);

/// Same scheme driven by tabulated source frames, one per time node.
SpaceTimeSeries solve_ibvp_frames(const CoefficientSet& coeffs,
                                  std::span<const SourceFrame> frames, const Mesh1D& mesh,
                                  const TimeGrid& tg, const ThetaSchemeConfig& cfg);

/// Max norm of the per-step defect of the theta recurrence for a given series
/// and frozen source frames. Zero (to round-off) iff the series solves the
/// discrete scheme.
double scheme_residual(const SpaceTimeSeries& u, const CoefficientSet& coeffs,
                       std::span<const SourceFrame> frames, const ThetaSchemeConfig& cfg);

}  // namespace parest
