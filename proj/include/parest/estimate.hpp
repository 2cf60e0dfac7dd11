#pragma once

#include <utility>
#include <vector>

#include "parest/stepper.hpp"

namespace parest {

/// Both sides of the weighted energy inequality, tracked at every time node.
/// ratio[j] = lhs[j] / ((1/2 + epsilon) rhs_F[j] + epsilon rhs_F0[j]), with
/// 0/0 counted as 0. pass requires ratio <= 1 (+ round-off tolerance) at all
/// time nodes.
struct EstimateReport {
  double K = 0.0;
  double M = 0.0;
  double epsilon = 0.0;
  std::vector<double> t;
  std::vector<double> lhs;
  std::vector<double> rhs_F;
  std::vector<double> rhs_F0;
  std::vector<double> ratio;
  double max_ratio = 0.0;
  bool pass = false;
};

/// Relative slack granted to the pass test, covering round-off only.
inline constexpr double kRatioTolerance = 1e-6;

/// Per-node values of sup_{s<=t} e^{-2Ks}||u||^2 + M int_0^t e^{-2Ks}||u||^2.
std::vector<double> lhs_energy(const SpaceTimeSeries& u, double K, double M);

/// Running integrals of e^{-2Ks}(F, b^{-1} F) and e^{-2Ks}||F0||^2.
std::pair<std::vector<double>, std::vector<double>> rhs_source(const SourceTerm& src,
                                                               const CoefficientSet& coeffs,
                                                               const Mesh1D& mesh,
                                                               const TimeGrid& tg, double K);

/// u must be the solve_ibvp output for (coeffs, src) at shift K.
EstimateReport check_inequality(const SpaceTimeSeries& u, const SourceTerm& src,
                                const CoefficientSet& coeffs, double K, double M, double epsilon);

/// Frame-based twins of the sampler-based operations, for tabulated sources
/// (the picard solver's frozen realized source).
std::pair<std::vector<double>, std::vector<double>> rhs_source_frames(
    std::span<const SourceFrame> frames, const CoefficientSet& coeffs, const Mesh1D& mesh,
    const TimeGrid& tg, double K);

EstimateReport check_inequality_frames(const SpaceTimeSeries& u,
                                       std::span<const SourceFrame> frames,
                                       const CoefficientSet& coeffs, double K, double M,
                                       double epsilon);

struct KSearchResult {
  bool found = false;
  double K = 0.0;
  /// Every evaluated shift with its family verdict, in evaluation order.
  std::vector<std::pair<double, bool>> tested;
};

/// Smallest shift on a geometric grid {0, 1, 2, 4, ...} refined by bisection
/// such that every source in the family passes check_inequality. found stays
/// false when no shift <= K_max works (K_max too small, not a violation).
KSearchResult search_K(const CoefficientSet& coeffs, const std::vector<SourceTerm>& family,
                       const Mesh1D& mesh, const TimeGrid& tg, double theta, double M,
                       double epsilon, double K_max);

KSearchResult search_K_frames(const CoefficientSet& coeffs, std::span<const SourceFrame> frames,
                              const Mesh1D& mesh, const TimeGrid& tg, double theta, double M,
                              double epsilon, double K_max);

enum class SourceKind { H0Source, HminusSource };

struct RatioPoint {
  double t = 0.0;
  double ratio = 0.0;
  bool trusted = true;           // t >= 8 dt
  double running_mean_dev = 0.0; // |p(t)/p(0) - 1| of the denominator density
};

/// ||u(.,t)||^2 normalized by the running source integral over [0, t] (its
/// density tends to the t = 0 weighted norm for admissible sources), sampled
/// at t_k = T/2^k. u is expected to solve the unshifted problem (K = 0).
std::vector<RatioPoint> initial_time_ratio(const SpaceTimeSeries& u, const SourceTerm& src,
                                           const CoefficientSet& coeffs, SourceKind kind);

}  // namespace parest
