#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "parest/stepper.hpp"

namespace parest {

enum class NonlocalVariant {
  Local,                           // B(u) = beta(u(x,t), x, t)
  Distributional,                  // B(u) = div beta(u(x,t), x, t)
  IntegralSpace,                   // B(u) = int_D beta(u(y,t), x, t, y) dy
  IntegralSpaceDistributional,     // div of the above
  IntegralSpaceTime,               // B(u) = int_0^t int_D beta(u(y,s), x, t, y, s) dy ds
  IntegralSpaceTimeDistributional, // div of the above
  Delay,                           // div beta(u(x,tau), x, tau) + beta_hat(u(x,tau), x, tau)
  JumpKernel,                      // int_D u(z,t) r(x,z,t) dz - m0 u - m1 u'
};

const char* variant_name(NonlocalVariant v);
NonlocalVariant variant_from_name(const std::string& name);

/// Tagged description of one operator family with the data it needs. Only the
/// samplers the variant uses have to be set.
struct NonlocalSpec {
  NonlocalVariant variant = NonlocalVariant::Local;

  std::function<double(double z, double x, double t)> beta_local;
  std::function<double(double z, double x, double t, double y)> beta_space;
  std::function<double(double z, double x, double t, double y, double s)> beta_spacetime;

  std::function<double(double z, double x, double t)> delay_beta_flux;
  std::function<double(double z, double x, double t)> delay_beta_plain;
  std::function<double(double t)> tau;
  double theta_delay = 0.0;

  std::function<double(double x, double z, double t)> kernel_r;
  SpaceTimeFn moment0;  // zero-order coefficient of the local remainder
  SpaceTimeFn moment1;  // gradient coefficient of the local remainder

  double C_L = 1.0;  // claimed Lipschitz constant of beta (and beta_hat)
};

/// Checks the spec's structural invariants against a discretization: required
/// samplers present and finite, tau a valid delay map, kernel square-integrable.
void validate_nonlocal(const NonlocalSpec& spec, const Mesh1D& mesh, const TimeGrid& tg);

/// B(u)(., t) split into the divergence-form component (to route through
/// apply_source_weak) and the plain H^0 component.
SourceFrame apply(const NonlocalSpec& spec, const SpaceTimeSeries& history, double t);

/// The exponential shift B_K(u) = e^{-Kt} B(e^{Ks} u). Throws Overflow when
/// K * T > 700.
SourceFrame apply_shifted(const NonlocalSpec& spec, double K, const SpaceTimeSeries& history,
                          double t);

/// One shifted frame per time node of the history.
std::vector<SourceFrame> apply_series(const NonlocalSpec& spec, double K,
                                      const SpaceTimeSeries& history);

// --- Empirical Lipschitz probing -------------------------------------------

struct ProbeResult {
  double ratio_xminus1 = 0.0;  // max ||B_K(u1)-B_K(u2)||_{X^-1} / ||u1-u2||_{X^0}
  double ratio_x0 = 0.0;       // same with the X^0 norm on the output
  double bound = 0.0;          // variant-specific constant implied by C_L
  int pairs_used = 0;
};

/// Max over random pairs of the shifted difference quotient; a lower bound on
/// the true constant, reported next to the variant bound derived from C_L.
ProbeResult lipschitz_probe(const NonlocalSpec& spec, double K, const Mesh1D& mesh,
                            const TimeGrid& tg, int trials, double amplitude,
                            std::uint64_t seed);

/// The constant the family's Lipschitz hypothesis implies for this variant:
/// C_L for local, C_L*l(D) for space integrals, C_L*l(Q) for space-time
/// integrals, sqrt(2 delta*) C_L for delay, the kernel L2 mass for jumps.
double variant_bound(const NonlocalSpec& spec, const Mesh1D& mesh, const TimeGrid& tg);

/// max over time nodes of the trapezoid of r(x,z,t)^2 over D x D.
double kernel_sq_integral_max(const NonlocalSpec& spec, const Mesh1D& mesh, const TimeGrid& tg);

/// Smooth random zero-trace field used by the probe (low sine modes with
/// bounded time envelopes, scaled by amplitude).
SpaceTimeSeries random_series(const Mesh1D& mesh, const TimeGrid& tg, double amplitude,
                              std::mt19937_64& rng);

// --- Tabulated data ---------------------------------------------------------

/// CSV `t,tau` with linear interpolation.
std::function<double(double)> load_delay_table(const std::string& path);

/// CSV `x,z,t,r` with trilinear interpolation.
std::function<double(double, double, double)> load_kernel_table(const std::string& path);

}  // namespace parest
