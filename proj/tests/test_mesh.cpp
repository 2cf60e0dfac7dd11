#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "parest/mesh.hpp"

using namespace parest;

namespace {

constexpr double kPi = std::numbers::pi;

Mesh1D pi_mesh(int n = 512) { return Mesh1D(-kPi, kPi, n); }

GridFunction random_field(const Mesh1D& mesh, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  GridFunction u(mesh);
  for (int i = 0; i < u.size(); ++i) u[i] = gauss(rng);
  return u;
}

}  // namespace

TEST_CASE("mesh invariants") {
  Mesh1D mesh(-kPi, kPi, 8);
  CHECK(mesh.interior_count() == 7);
  CHECK(mesh.h() == doctest::Approx(2.0 * kPi / 8));
  CHECK(mesh.node(0) == doctest::Approx(-kPi));
  CHECK(mesh.node(8) == doctest::Approx(kPi));
  CHECK_THROWS_AS(Mesh1D(1.0, 0.0, 8), Error);
  CHECK_THROWS_AS(Mesh1D(0.0, 1.0, 3), Error);
}

TEST_CASE("norm_h0") {
  CHECK(norm_h0(GridFunction(pi_mesh())) == 0.0);

  GridFunction u = GridFunction::sample(pi_mesh(), [](double x) { return std::sin(x); });
  CHECK(norm_h0(u) == doctest::Approx(std::sqrt(kPi)).epsilon(1e-4 / std::sqrt(kPi)));

  GridFunction u2 = GridFunction::sample(pi_mesh(), [](double x) { return std::sin(2 * x); });
  CHECK(norm_h0(u2) == doctest::Approx(std::sqrt(kPi)).epsilon(1e-4 / std::sqrt(kPi)));
}

TEST_CASE("norm_h1") {
  CHECK(norm_h1(GridFunction(pi_mesh())) == 0.0);

  GridFunction u = GridFunction::sample(pi_mesh(), [](double x) { return std::sin(x); });
  const double expected = std::sqrt(2.0 * kPi);
  CHECK(std::abs(norm_h1(u) - expected) < 1e-3);

  // Richardson: halving h divides the error by about four.
  GridFunction coarse = GridFunction::sample(pi_mesh(256), [](double x) { return std::sin(x); });
  GridFunction fine = GridFunction::sample(pi_mesh(512), [](double x) { return std::sin(x); });
  const double e_coarse = std::abs(norm_h1(coarse) - expected);
  const double e_fine = std::abs(norm_h1(fine) - expected);
  CHECK(e_coarse / e_fine > 3.0);
  CHECK(e_coarse / e_fine < 5.0);
}

TEST_CASE("norm_hminus1 against eigenfunctions") {
  CHECK(norm_hminus1(GridFunction(pi_mesh())) == 0.0);

  GridFunction u = GridFunction::sample(pi_mesh(), [](double x) { return std::sin(x); });
  CHECK(std::abs(norm_hminus1(u) - std::sqrt(kPi / 2.0)) < 1e-3);

  GridFunction u3 = GridFunction::sample(pi_mesh(), [](double x) { return std::sin(3 * x); });
  CHECK(std::abs(norm_hminus1(u3) - std::sqrt(kPi / 10.0)) < 1e-3);
}

TEST_CASE("weighted_inner_binv") {
  Mesh1D mesh = pi_mesh();
  NodeField zero(mesh);
  NodeField b1 = NodeField::sample(mesh, [](double) { return 1.0; });
  CHECK(weighted_inner_binv(zero, b1) == 0.0);

  NodeField F = NodeField::sample(mesh, [](double x) { return std::cos(x); });
  CHECK(std::abs(weighted_inner_binv(F, b1) - kPi) < 1e-3);

  NodeField b4 = NodeField::sample(mesh, [](double) { return 4.0; });
  CHECK(std::abs(weighted_inner_binv(F, b4) - kPi / 4.0) < 1e-3);

  NodeField bad = NodeField::sample(mesh, [](double x) { return std::sin(x); });
  CHECK_THROWS_AS(weighted_inner_binv(F, bad), Error);

  // Identical quadrature rule as norm_h0 on node fields.
  const double n0 = norm_h0(F);
  CHECK(weighted_inner_binv(F, b1) == doctest::Approx(n0 * n0).epsilon(1e-12));
}

TEST_CASE("time_integral") {
  TimeGrid tg(1.0, 1000);
  std::vector<double> zero(tg.n_nodes(), 0.0);
  CHECK(time_integral(zero, tg, 0.0) == 0.0);

  std::vector<double> one(tg.n_nodes(), 1.0);
  CHECK(time_integral(one, tg, 0.0) == doctest::Approx(1.0).epsilon(1e-14));

  const double expected = (1.0 - std::exp(-2.0)) / 2.0;
  CHECK(std::abs(time_integral(one, tg, 1.0) - expected) < 1e-6);

  std::vector<double> prefix = time_integral_prefix(one, tg, 1.0);
  CHECK(prefix.front() == 0.0);
  CHECK(prefix.back() == doctest::Approx(time_integral(one, tg, 1.0)).epsilon(1e-14));
}

TEST_CASE("norms are absolutely homogeneous and nested") {
  std::mt19937_64 rng(82);
  Mesh1D mesh = pi_mesh(64);
  for (int trial = 0; trial < 25; ++trial) {
    GridFunction u = random_field(mesh, rng);
    const double c = std::uniform_real_distribution<double>(-5.0, 5.0)(rng);
    GridFunction cu = u;
    cu *= c;
    CHECK(norm_h0(cu) == doctest::Approx(std::abs(c) * norm_h0(u)).epsilon(1e-12));
    CHECK(norm_h1(cu) == doctest::Approx(std::abs(c) * norm_h1(u)).epsilon(1e-12));
    CHECK(norm_hminus1(cu) == doctest::Approx(std::abs(c) * norm_hminus1(u)).epsilon(1e-12));

    CHECK(norm_hminus1(u) <= norm_h0(u) * (1 + 1e-12));
    CHECK(norm_h0(u) <= norm_h1(u) * (1 + 1e-12));
  }
}

TEST_CASE("norms converge at second order on smooth functions") {
  // Cubic with zero trace; not periodic, so the quadrature error is genuine.
  auto f = [](double x) { return x * (kPi * kPi - x * x); };
  GridFunction ref = GridFunction::sample(pi_mesh(4096), f);
  const double exact[3] = {norm_h0(ref), norm_h1(ref), norm_hminus1(ref)};

  double prev_err[3] = {0, 0, 0};
  for (int level = 0; level < 3; ++level) {
    const int n = 64 << level;
    GridFunction u = GridFunction::sample(pi_mesh(n), f);
    const double err[3] = {std::abs(norm_h0(u) - exact[0]), std::abs(norm_h1(u) - exact[1]),
                           std::abs(norm_hminus1(u) - exact[2])};
    if (level > 0)
      for (int k = 0; k < 3; ++k) {
        const double order = std::log2(prev_err[k] / err[k]);
        CHECK(order > 1.8);  // superconvergence beyond 2 is fine
      }
    for (int k = 0; k < 3; ++k) prev_err[k] = err[k];
  }
}

TEST_CASE("series interpolation") {
  Mesh1D mesh = pi_mesh(16);
  TimeGrid tg(1.0, 4);
  SpaceTimeSeries s;
  s.time_grid = tg;
  for (int j = 0; j <= 4; ++j) {
    GridFunction f(mesh);
    for (int i = 0; i < f.size(); ++i) f[i] = j;
    s.frames.push_back(f);
  }
  CHECK(s.at_time(0.375)[0] == doctest::Approx(1.5));
  CHECK(s.at_time(-1.0)[0] == doctest::Approx(0.0));
  CHECK(s.at_time(2.0)[0] == doctest::Approx(4.0));
}
