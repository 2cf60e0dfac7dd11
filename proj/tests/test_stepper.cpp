#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "parest/sharpness.hpp"
#include "parest/stepper.hpp"

using namespace parest;

namespace {

constexpr double kPi = std::numbers::pi;

// Manufactured solution u = sin(x)(1 - e^{-t}) for variable coefficients.
struct Manufactured {
  CoefficientSet coeffs;
  SourceTerm src;
  SpaceTimeFn exact;

  Manufactured() {
    coeffs.b = [](double x, double) { return 2.0 + std::cos(x); };
    coeffs.f = [](double x, double) { return 0.5 * std::sin(x); };
    coeffs.lambda = [](double x, double) { return 0.3 * std::cos(x); };
    coeffs.delta = 0.5;
    coeffs.sup_bound = 10.0;
    src.F = [](double, double) { return 0.0; };
    src.F0 = [](double x, double t) {
      const double g = 1.0 - std::exp(-t);
      return std::sin(x) * std::exp(-t) + g * (2.0 * std::sin(x) + 1.2 * std::sin(x) * std::cos(x));
    };
    exact = [](double x, double t) { return std::sin(x) * (1.0 - std::exp(-t)); };
  }
};

double final_time_error(const SpaceTimeSeries& u, const SpaceTimeFn& exact) {
  GridFunction diff = u.frames.back();
  for (int i = 0; i < diff.size(); ++i) diff[i] -= exact(diff.x(i), u.time_grid.T);
  return norm_h0(diff);
}

}  // namespace

TEST_CASE("assemble reduces to the classic stencils") {
  Mesh1D mesh(-kPi, kPi, 16);
  const double h2 = mesh.h() * mesh.h();

  TridiagonalOperator L = assemble(CoefficientSet::heat(), mesh, 0.0, 0.0);
  for (int i = 0; i < L.size(); ++i) {
    CHECK(L.diag[i] == doctest::Approx(-2.0 / h2));
    if (i > 0) CHECK(L.lower[i] == doctest::Approx(1.0 / h2));
    if (i + 1 < L.size()) CHECK(L.upper[i] == doctest::Approx(1.0 / h2));
  }

  TridiagonalOperator L5 = assemble(CoefficientSet::heat(), mesh, 0.0, 5.0);
  for (int i = 0; i < L5.size(); ++i) CHECK(L5.diag[i] == doctest::Approx(-2.0 / h2 - 5.0));

  TridiagonalOperator L2 = assemble(CoefficientSet::constants(2, 0, 0, 1, 10), mesh, 0.0, 0.0);
  for (int i = 0; i < L2.size(); ++i) {
    CHECK(L2.diag[i] == doctest::Approx(-4.0 / h2));
    if (i > 0) CHECK(L2.lower[i] == doctest::Approx(2.0 / h2));
  }

  CoefficientSet bad = CoefficientSet::constants(-1, 0, 0, 1, 10);
  CHECK_THROWS_AS(assemble(bad, mesh, 0.0, 0.0), Error);
}

TEST_CASE("apply_source_weak") {
  Mesh1D mesh(-kPi, kPi, 256);

  CHECK(norm_h0(apply_source_weak(NodeField(mesh), NodeField(mesh))) == 0.0);

  NodeField constant = NodeField::sample(mesh, [](double) { return 3.7; });
  CHECK(norm_h0(apply_source_weak(constant, NodeField(mesh))) == 0.0);

  for (int m : {1, 2, 4}) {
    NodeField F = NodeField::sample(mesh, [m](double x) { return -std::cos(m * x); });
    GridFunction div = apply_source_weak(F, NodeField(mesh));
    double worst = 0.0;
    for (int i = 0; i < div.size(); ++i)
      worst = std::max(worst, std::abs(div[i] - m * std::sin(m * div.x(i))));
    CHECK(worst < 2.0 * m * m * m * mesh.h() * mesh.h());
  }
}

TEST_CASE("discrete duality identity holds to round-off") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mesh1D mesh(-kPi, kPi, 64);
  for (int trial = 0; trial < 20; ++trial) {
    GridFunction u(mesh);
    for (int i = 0; i < u.size(); ++i) u[i] = gauss(rng);
    NodeField F(mesh);
    for (int i = 0; i < F.size(); ++i) F[i] = gauss(rng);

    const double lhs = inner_h0(u, apply_source_weak(F, NodeField(mesh)));
    const double rhs = -dual_pair_gradient(u, F);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("solve_ibvp with zero source stays zero") {
  Mesh1D mesh(-kPi, kPi, 32);
  TimeGrid tg(1.0, 50);
  SpaceTimeSeries u =
      solve_ibvp(CoefficientSet::heat(), SourceTerm::zero(), mesh, tg, {0.5, 0.0});
  for (const GridFunction& frame : u.frames) CHECK(norm_h0(frame) == 0.0);
}

TEST_CASE("heat case reproduces the closed-form solution within 1%") {
  SharpCase c{1, 0.0, 1.0};
  SharpOracle oracle = make_case(c);
  Mesh1D mesh = sharp_mesh(256);
  TimeGrid tg(1.0, 2000);
  SpaceTimeSeries u = solve_ibvp(sharp_coefficients(), oracle.source, mesh, tg, {0.5, 0.0});

  GridFunction exact = GridFunction::sample(mesh, [&](double x) { return oracle.exact(x, 1.0); });
  const double rel = final_time_error(u, oracle.exact) / norm_h0(exact);
  CHECK(rel < 0.01);
}

TEST_CASE("exponential shift equivalence") {
  Mesh1D mesh(-kPi, kPi, 128);
  TimeGrid tg(1.0, 800);
  const double K = 2.0;

  SourceTerm phi;
  phi.F = [](double x, double t) { return std::cos(x) * (1.0 + 0.3 * t); };
  phi.F0 = [](double x, double t) { return std::sin(2 * x) * std::exp(0.5 * t); };

  SourceTerm phi_damped;
  phi_damped.F = [&, K](double x, double t) { return std::exp(-K * t) * phi.F(x, t); };
  phi_damped.F0 = [&, K](double x, double t) { return std::exp(-K * t) * phi.F0(x, t); };

  CoefficientSet coeffs = CoefficientSet::constants(1.0, 0.2, -0.3, 0.5, 10.0);
  SpaceTimeSeries base = solve_ibvp(coeffs, phi, mesh, tg, {0.5, 0.0});
  SpaceTimeSeries shifted = solve_ibvp(coeffs, phi_damped, mesh, tg, {0.5, K});

  double worst = 0.0;
  for (int j = 0; j < tg.n_nodes(); ++j) {
    GridFunction lifted = shifted.frames[j];
    lifted *= std::exp(K * tg.node(j));
    lifted -= base.frames[j];
    worst = std::max(worst, norm_h0(lifted));
  }
  const double scale = norm_h0(base.frames.back());
  CHECK(worst / scale < 1e-3);
}

TEST_CASE("energy dissipates once the source switches off") {
  Mesh1D mesh(-kPi, kPi, 64);
  TimeGrid tg(1.0, 200);
  SourceTerm pulse;
  pulse.F = [](double, double) { return 0.0; };
  pulse.F0 = [](double x, double t) { return t <= 0.2 ? std::sin(x) : 0.0; };
  SpaceTimeSeries u = solve_ibvp(CoefficientSet::heat(), pulse, mesh, tg, {0.5, 0.0});
  for (int j = 0; j < tg.n_steps; ++j) {
    if (tg.node(j) < 0.25) continue;
    CHECK(norm_h0(u.frames[j + 1]) <= norm_h0(u.frames[j]) * (1 + 1e-12));
  }
}

TEST_CASE("manufactured solution converges at order 2 in h") {
  Manufactured mms;
  TimeGrid tg(1.0, 2048);
  double prev = 0.0;
  for (int level = 0; level < 3; ++level) {
    const int n = 32 << level;
    SpaceTimeSeries u = solve_ibvp(mms.coeffs, mms.src, Mesh1D(-kPi, kPi, n), tg, {0.5, 0.0});
    const double err = final_time_error(u, mms.exact);
    if (level > 0) CHECK(std::log2(prev / err) > 1.9);
    prev = err;
  }
}

TEST_CASE("theta scheme converges at order 2 (CN) and 1 (implicit Euler) in dt") {
  Manufactured mms;
  Mesh1D mesh(-kPi, kPi, 64);
  for (double theta : {0.5, 1.0}) {
    SpaceTimeSeries ref = solve_ibvp(mms.coeffs, mms.src, mesh, TimeGrid(1.0, 4096), {theta, 0.0});
    double prev = 0.0;
    for (int level = 0; level < 3; ++level) {
      const int steps = 16 << level;
      SpaceTimeSeries u = solve_ibvp(mms.coeffs, mms.src, mesh, TimeGrid(1.0, steps), {theta, 0.0});
      GridFunction diff = u.frames.back() - ref.frames.back();
      const double err = norm_h0(diff);
      if (level > 0) {
        const double order = std::log2(prev / err);
        if (theta == 0.5)
          CHECK(order > 1.9);
        else {
          CHECK(order > 0.9);
          CHECK(order < 1.5);
        }
      }
      prev = err;
    }
  }
}

TEST_CASE("solve_ibvp_frames matches the sampler path and has zero scheme residual") {
  Manufactured mms;
  Mesh1D mesh(-kPi, kPi, 48);
  TimeGrid tg(0.5, 60);

  std::vector<SourceFrame> frames;
  for (int j = 0; j <= tg.n_steps; ++j) {
    frames.emplace_back(sample_nodes(mms.src.F, mesh, tg.node(j)),
                        sample_interior(mms.src.F0, mesh, tg.node(j)));
  }
  SpaceTimeSeries a = solve_ibvp(mms.coeffs, mms.src, mesh, tg, {0.5, 0.0});
  SpaceTimeSeries b = solve_ibvp_frames(mms.coeffs, frames, mesh, tg, {0.5, 0.0});
  for (int j = 0; j <= tg.n_steps; ++j) {
    GridFunction d = a.frames[j] - b.frames[j];
    CHECK(norm_h0(d) == 0.0);
  }

  CHECK(scheme_residual(b, mms.coeffs, frames, {0.5, 0.0}) < 1e-12);
}

TEST_CASE("huge zero-order stiffness emits an accuracy warning") {
  Mesh1D mesh(-kPi, kPi, 16);
  TimeGrid tg(1.0, 100);  // dt * K = 25.6 > 2
  std::stringstream captured;
  std::streambuf* old = std::cerr.rdbuf(captured.rdbuf());
  solve_ibvp(CoefficientSet::heat(), SourceTerm::zero(), mesh, tg, {0.5, 2560.0});
  std::cerr.rdbuf(old);
  CHECK(captured.str().find("accuracy may degrade") != std::string::npos);
}

TEST_CASE("theta outside [1/2, 1] is rejected") {
  Mesh1D mesh(-kPi, kPi, 16);
  TimeGrid tg(1.0, 4);
  CHECK_THROWS_AS(solve_ibvp(CoefficientSet::heat(), SourceTerm::zero(), mesh, tg, {0.3, 0.0}),
                  Error);
}
