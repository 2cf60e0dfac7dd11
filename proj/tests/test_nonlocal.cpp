#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "parest/nonlocal.hpp"

using namespace parest;

namespace {

constexpr double kPi = std::numbers::pi;

SpaceTimeSeries series_of(const Mesh1D& mesh, const TimeGrid& tg, const SpaceTimeFn& f) {
  SpaceTimeSeries s;
  s.time_grid = tg;
  for (int j = 0; j <= tg.n_steps; ++j)
    s.frames.push_back(GridFunction::sample(mesh, [&](double x) { return f(x, tg.node(j)); }));
  return s;
}

double trapz_interior(const GridFunction& u) {
  double s = 0.0;
  for (double v : u.values()) s += v;
  return u.mesh().h() * s;
}

NonlocalSpec local_spec(std::function<double(double)> shape, double C_L) {
  NonlocalSpec spec;
  spec.variant = NonlocalVariant::Local;
  spec.beta_local = [shape = std::move(shape)](double z, double, double) { return shape(z); };
  spec.C_L = C_L;
  return spec;
}

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
  auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("zero input maps to zero for every variant") {
  Mesh1D mesh(-kPi, kPi, 24);
  TimeGrid tg(1.0, 12);
  SpaceTimeSeries zero;
  zero.time_grid = tg;
  for (int j = 0; j <= tg.n_steps; ++j) zero.frames.emplace_back(mesh);

  for (NonlocalVariant v :
       {NonlocalVariant::Local, NonlocalVariant::Distributional, NonlocalVariant::IntegralSpace,
        NonlocalVariant::IntegralSpaceDistributional, NonlocalVariant::IntegralSpaceTime,
        NonlocalVariant::IntegralSpaceTimeDistributional, NonlocalVariant::Delay,
        NonlocalVariant::JumpKernel}) {
    NonlocalSpec spec;
    spec.variant = v;
    spec.beta_local = [](double z, double, double) { return z; };
    spec.beta_space = [](double z, double, double, double) { return z; };
    spec.beta_spacetime = [](double z, double, double, double, double) { return z; };
    spec.delay_beta_flux = [](double z, double, double) { return z; };
    spec.delay_beta_plain = [](double z, double, double) { return 2 * z; };
    spec.tau = [](double t) { return std::max(0.0, t - 0.25); };
    spec.theta_delay = 0.25;
    spec.kernel_r = [](double x, double z, double) { return std::cos(x - z); };
    validate_nonlocal(spec, mesh, tg);

    SourceFrame out = apply(spec, zero, 0.7);
    CHECK(norm_h0(out.flux) == 0.0);
    CHECK(norm_h0(out.plain) == 0.0);
  }
}

TEST_CASE("integral-space with identity kernel averages the slice") {
  Mesh1D mesh(-kPi, kPi, 64);
  TimeGrid tg(1.0, 10);
  SpaceTimeSeries u =
      series_of(mesh, tg, [](double x, double t) { return std::sin(x / 2.0) * (1.0 + t); });

  NonlocalSpec spec;
  spec.variant = NonlocalVariant::IntegralSpace;
  spec.beta_space = [](double z, double, double, double) { return z; };

  const double t = 0.5;
  SourceFrame out = apply(spec, u, t);
  const double expected = trapz_interior(u.at_time(t));
  for (int i = 0; i < out.plain.size(); ++i)
    CHECK(out.plain[i] == doctest::Approx(expected).epsilon(1e-12));
  CHECK(norm_h0(out.flux) == 0.0);
}

TEST_CASE("space-time integral matches a direct double trapezoid") {
  Mesh1D mesh(-kPi, kPi, 32);
  TimeGrid tg(1.0, 16);
  SpaceTimeSeries u =
      series_of(mesh, tg, [](double x, double t) { return std::cos(x) * x * (1.0 - t / 2.0); });

  NonlocalSpec spec;
  spec.variant = NonlocalVariant::IntegralSpaceTime;
  spec.beta_spacetime = [](double z, double, double, double, double) { return z; };

  // direct trapezoid over [0, t_j] x D of the same nodal data
  const int j_eval = 10;
  std::vector<double> slice(j_eval + 1, 0.0);
  for (int j = 0; j <= j_eval; ++j) slice[j] = trapz_interior(u.frames[j]);
  double expected = 0.0;
  for (int j = 0; j < j_eval; ++j) expected += 0.5 * tg.dt() * (slice[j] + slice[j + 1]);

  SourceFrame out = apply(spec, u, tg.node(j_eval));
  for (int i = 0; i < out.plain.size(); i += 5)
    CHECK(out.plain[i] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("delay with identity plain beta shifts the history") {
  Mesh1D mesh(-kPi, kPi, 48);
  TimeGrid tg(1.0, 40);
  SpaceTimeSeries u = series_of(mesh, tg, [](double x, double t) { return std::sin(x) * t; });

  NonlocalSpec spec;
  spec.variant = NonlocalVariant::Delay;
  spec.delay_beta_plain = [](double z, double, double) { return z; };
  spec.tau = [](double t) { return std::max(0.0, t - 0.1); };
  spec.theta_delay = 0.1;
  validate_nonlocal(spec, mesh, tg);

  SourceFrame late = apply(spec, u, 0.6);
  for (int i = 0; i < late.plain.size(); ++i)
    CHECK(late.plain[i] == doctest::Approx(std::sin(late.plain.x(i)) * 0.5).epsilon(1e-10));

  SourceFrame early = apply(spec, u, 0.05);
  CHECK(norm_h0(early.plain) == 0.0);

  CHECK_THROWS_AS(apply(spec, u, 1.5), Error);
}

TEST_CASE("distributional variant routes through the flux slot") {
  Mesh1D mesh(-kPi, kPi, 64);
  TimeGrid tg(1.0, 8);
  SpaceTimeSeries u = series_of(mesh, tg, [](double x, double) { return std::sin(x); });

  NonlocalSpec spec;
  spec.variant = NonlocalVariant::Distributional;
  spec.beta_local = [](double z, double, double) { return z; };

  SourceFrame out = apply(spec, u, 0.5);
  CHECK(norm_h0(out.plain) == 0.0);
  // flux holds the slice itself (zero at the boundary via the zero trace)
  CHECK(out.flux[0] == 0.0);
  for (int i = 1; i < mesh.n_cells; ++i)
    CHECK(out.flux[i] == doctest::Approx(std::sin(mesh.node(i))).epsilon(1e-12));
  // assembled value approximates d/dx sin = cos
  GridFunction div = out.assembled();
  for (int i = 2; i < div.size() - 2; ++i)
    CHECK(div[i] == doctest::Approx(std::cos(div.x(i))).epsilon(2e-2));
}

TEST_CASE("jump kernel with cosine kernel and zero-order moment") {
  Mesh1D mesh(-kPi, kPi, 256);
  TimeGrid tg(1.0, 4);
  SpaceTimeSeries u = series_of(mesh, tg, [](double x, double) { return std::sin(x); });

  NonlocalSpec spec;
  spec.variant = NonlocalVariant::JumpKernel;
  spec.kernel_r = [](double x, double z, double) { return std::cos(x - z); };
  spec.moment0 = [](double, double) { return 1.0; };

  SourceFrame out = apply(spec, u, 0.5);
  // integral of sin(z) cos(x-z) over (-pi, pi) = pi sin(x); minus u itself
  for (int i = 10; i < out.plain.size() - 10; i += 9)
    CHECK(out.plain[i] ==
          doctest::Approx((kPi - 1.0) * std::sin(out.plain.x(i))).epsilon(1e-3));
}

TEST_CASE("shift identities") {
  Mesh1D mesh(-kPi, kPi, 32);
  TimeGrid tg(1.0, 20);
  SpaceTimeSeries u =
      series_of(mesh, tg, [](double x, double t) { return std::sin(x) * (1.0 + t * t); });

  NonlocalSpec nonlinear = local_spec([](double z) { return std::sin(z); }, 1.0);

  // K = 0 reduces to the plain application
  SourceFrame a = apply(nonlinear, u, 0.7);
  SourceFrame b = apply_shifted(nonlinear, 0.0, u, 0.7);
  for (int i = 0; i < a.plain.size(); ++i) CHECK(a.plain[i] == b.plain[i]);

  // linear beta: the exponential factors cancel exactly
  NonlocalSpec linear = local_spec([](double z) { return z; }, 1.0);
  for (double K : {0.5, 3.0}) {
    SourceFrame out = apply_shifted(linear, K, u, 0.7);
    GridFunction slice = u.at_time(0.7);
    for (int i = 0; i < out.plain.size(); ++i)
      CHECK(out.plain[i] == doctest::Approx(slice[i]).epsilon(1e-12));
  }

  // delay + linear beta: output picks up e^{-K (t - tau(t))}
  NonlocalSpec delay;
  delay.variant = NonlocalVariant::Delay;
  delay.delay_beta_plain = [](double z, double, double) { return z; };
  delay.tau = [](double t) { return std::max(0.0, t - 0.25); };
  delay.theta_delay = 0.25;
  const double K = 1.0, t = 0.75, tau_t = 0.5;
  SourceFrame out = apply_shifted(delay, K, u, t);
  GridFunction slice = u.at_time(tau_t);
  for (int i = 0; i < out.plain.size(); ++i)
    CHECK(out.plain[i] == doctest::Approx(std::exp(-K * (t - tau_t)) * slice[i]).epsilon(1e-10));

  CHECK_THROWS_AS(apply_shifted(linear, 800.0, u, 0.5), Error);  // K*T > 700
}

TEST_CASE("validate_nonlocal rejects malformed specs") {
  Mesh1D mesh(-kPi, kPi, 16);
  TimeGrid tg(1.0, 8);

  NonlocalSpec missing;
  missing.variant = NonlocalVariant::IntegralSpace;
  CHECK_THROWS_AS(validate_nonlocal(missing, mesh, tg), Error);

  NonlocalSpec bad_tau;
  bad_tau.variant = NonlocalVariant::Delay;
  bad_tau.delay_beta_plain = [](double z, double, double) { return z; };
  bad_tau.tau = [](double t) { return 2.0 * t; };  // leaves [0, t]
  CHECK_THROWS_AS(validate_nonlocal(bad_tau, mesh, tg), Error);

  bad_tau.tau = [](double t) { return std::max(0.0, 0.5 - t); };  // decreasing
  CHECK_THROWS_AS(validate_nonlocal(bad_tau, mesh, tg), Error);

  NonlocalSpec late_zero;
  late_zero.variant = NonlocalVariant::Delay;
  late_zero.delay_beta_plain = [](double z, double, double) { return z; };
  late_zero.tau = [](double t) { return t; };  // nonzero below theta
  late_zero.theta_delay = 0.5;
  CHECK_THROWS_AS(validate_nonlocal(late_zero, mesh, tg), Error);
}

TEST_CASE("lipschitz probe on local nonlinearities") {
  Mesh1D mesh(-kPi, kPi, 48);
  TimeGrid tg(1.0, 24);

  NonlocalSpec sin_spec = local_spec([](double z) { return std::sin(z); }, 1.0);
  ProbeResult sin_probe = lipschitz_probe(sin_spec, 0.0, mesh, tg, 40, 1.0, 11);
  CHECK(sin_probe.pairs_used == 40);
  CHECK(sin_probe.bound == doctest::Approx(1.0));
  CHECK(sin_probe.ratio_x0 <= 1.0 + 1e-9);
  CHECK(sin_probe.ratio_xminus1 <= sin_probe.ratio_x0 + 1e-12);

  const double c = 0.7;
  NonlocalSpec lin_spec = local_spec([c](double z) { return c * z; }, c);
  ProbeResult lin_probe = lipschitz_probe(lin_spec, 0.0, mesh, tg, 40, 1.0, 12);
  CHECK(lin_probe.ratio_x0 == doctest::Approx(c).epsilon(0.05));
  CHECK(lin_probe.ratio_xminus1 <= c * (1.0 + 1e-9));

  // coincident draws are skipped
  ProbeResult degenerate = lipschitz_probe(lin_spec, 0.0, mesh, tg, 5, 0.0, 13);
  CHECK(degenerate.pairs_used == 0);
  CHECK(degenerate.ratio_xminus1 == 0.0);
}

TEST_CASE("probe respects the variant bounds") {
  Mesh1D mesh(-kPi, kPi, 32);
  TimeGrid tg(0.5, 16);
  const double L = 2.0 * kPi;

  NonlocalSpec space;
  space.variant = NonlocalVariant::IntegralSpace;
  space.beta_space = [](double z, double, double, double y) { return 0.5 * std::sin(z) * std::cos(y); };
  space.C_L = 0.5;
  ProbeResult ps = lipschitz_probe(space, 0.0, mesh, tg, 25, 1.5, 21);
  CHECK(ps.bound == doctest::Approx(0.5 * L));
  CHECK(ps.ratio_xminus1 <= ps.bound * 1.05);

  NonlocalSpec spacetime;
  spacetime.variant = NonlocalVariant::IntegralSpaceTime;
  spacetime.beta_spacetime = [](double z, double, double, double, double) { return std::sin(z); };
  spacetime.C_L = 1.0;
  ProbeResult pst = lipschitz_probe(spacetime, 0.0, mesh, tg, 25, 1.5, 22);
  CHECK(pst.bound == doctest::Approx(L * tg.T));
  CHECK(pst.ratio_xminus1 <= pst.bound * 1.05);

  NonlocalSpec delay;
  delay.variant = NonlocalVariant::Delay;
  delay.delay_beta_flux = [](double z, double, double) { return 0.5 * std::sin(z); };
  delay.delay_beta_plain = [](double z, double, double) { return 0.5 * std::cos(2 * z); };
  delay.tau = [](double t) { return std::max(0.0, t - 0.125); };
  delay.theta_delay = 0.125;
  delay.C_L = 1.0;  // covers both shapes
  ProbeResult pd = lipschitz_probe(delay, 0.0, mesh, tg, 25, 1.5, 23);
  CHECK(pd.bound == doctest::Approx(std::sqrt(2.0)));  // delta* = 1 for a pure lag
  CHECK(pd.ratio_xminus1 <= pd.bound * 1.05);

  NonlocalSpec jump;
  jump.variant = NonlocalVariant::JumpKernel;
  jump.kernel_r = [](double x, double z, double t) { return std::cos(x - z) * (1.0 + 0.1 * t); };
  ProbeResult pj = lipschitz_probe(jump, 0.0, mesh, tg, 25, 1.5, 24);
  const double mass = kernel_sq_integral_max(jump, mesh, tg);
  CHECK(pj.bound == doctest::Approx(std::sqrt(mass)));
  CHECK(pj.ratio_xminus1 <= pj.bound * 1.05);
}

TEST_CASE("delay and kernel tables load with interpolation") {
  auto delay_path = write_temp("parest_delay.csv", "t,tau\n0,0\n0.5,0\n1,0.5\n");
  auto tau = load_delay_table(delay_path.string());
  CHECK(tau(0.25) == doctest::Approx(0.0));
  CHECK(tau(0.75) == doctest::Approx(0.25));
  CHECK(tau(1.0) == doctest::Approx(0.5));

  std::string kernel_csv = "x,z,t,r\n";
  for (double t : {0.0, 1.0})
    for (double x : {-1.0, 1.0})
      for (double z : {-1.0, 1.0}) {
        kernel_csv += std::to_string(x) + "," + std::to_string(z) + "," + std::to_string(t) +
                      "," + std::to_string(x + 2 * z + 3 * t) + "\n";
      }
  auto kernel_path = write_temp("parest_kernel.csv", kernel_csv);
  auto r = load_kernel_table(kernel_path.string());
  CHECK(r(-1.0, -1.0, 0.0) == doctest::Approx(-3.0));
  CHECK(r(1.0, 1.0, 1.0) == doctest::Approx(6.0));
  CHECK(r(0.0, 0.0, 0.5) == doctest::Approx(1.5));  // trilinear midpoint
}
