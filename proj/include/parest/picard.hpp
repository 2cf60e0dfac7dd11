#pragma once

#include "parest/estimate.hpp"
#include "parest/nonlocal.hpp"

namespace parest {

enum class PicardNormMode { Xminus1, X0 };

struct PicardConfig {
  double K = 0.0;        // initial shift; auto-doubled while quotients stall
  double M = 1.0;        // weight reported with the a-posteriori estimate
  int max_iters = 50;
  double tol = 1e-10;    // relative residual tolerance in the mode norm
  PicardNormMode norm_mode = PicardNormMode::Xminus1;
  double theta = 0.5;
  double K_max = 2048.0; // escalation cap
};

struct PicardTrace {
  std::vector<double> residuals;  // ||g_{k+1} - g_k|| in the mode norm
  // residual_k / residual_{k-1}, aligned with residuals; 0 where undefined
  // (the first iteration and the restart after each shift escalation)
  std::vector<double> quotients;
  std::vector<double> K_used;     // shift active at each iteration
  bool converged = false;
  int iterations = 0;
  double K_final = 0.0;
};

struct PicardResult {
  SpaceTimeSeries u;  // solution of the unshifted problem, u = e^{Kt} F_K g
  PicardTrace trace;
};

/// Fixed point of g = phi_K + B_K(F_K g) by simple iteration; throws
/// NoContraction when quotients stall even at the escalation cap and
/// MaxItersExceeded when the budget runs out while still contracting.
PicardResult solve_nonlinear(const CoefficientSet& coeffs, const NonlocalSpec& spec,
                             const SourceTerm& phi, const Mesh1D& mesh, const TimeGrid& tg,
                             const PicardConfig& cfg);

/// A-posteriori estimate for the nonlinear solution: freezes the realized
/// source phi + B(u), searches a passing shift, and reports the inequality at
/// that shift. Throws NotFound when no shift <= K_max passes.
EstimateReport verify_nonlocal_estimate(const SpaceTimeSeries& u, const NonlocalSpec& spec,
                                        const SourceTerm& phi, const CoefficientSet& coeffs,
                                        double M, double epsilon, double theta, double K_max);

/// The frozen realized source frames phi + B(u) at every time node.
std::vector<SourceFrame> realized_source(const SpaceTimeSeries& u, const NonlocalSpec& spec,
                                         const SourceTerm& phi);

}  // namespace parest
