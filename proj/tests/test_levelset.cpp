#include <doctest.h>

#include <cmath>

#include "exitlab/elliptic.hpp"
#include "exitlab/fd_ops.hpp"
#include "exitlab/grid.hpp"
#include "exitlab/levelset.hpp"

using namespace exitlab;

namespace {
std::shared_ptr<const DomainGrid> disc_grid(int n = 256) {
  DomainSpec s;
  s.kind = ShapeKind::disc;
  s.nx = s.ny = n;
  return build_domain(s);
}

ScalarField disc_profile_field(const std::shared_ptr<const DomainGrid>& g) {
  return sample_field(
      g, [](double x, double y) { return (1.0 - x * x - y * y) / 4.0; }, true);
}
}  // namespace

TEST_CASE("area profile of the disc matches the closed form") {
  auto g = disc_grid();
  auto psi = disc_profile_field(g);
  AreaProfile prof = area_profile(psi);

  CHECK(prof.max_level == doctest::Approx(0.25).epsilon(1e-3));
  CHECK(prof.area.front() == doctest::Approx(M_PI).epsilon(1e-3));
  CHECK(std::fabs(prof.area.front() - g->area) < 0.01 * g->area);
  CHECK(prof.area.back() < 5e-3);

  // a(h) = pi (1 - 4h)
  for (double h : {0.05, 0.1, 0.15, 0.2}) {
    CHECK(prof.area_at(h) == doctest::Approx(M_PI * (1 - 4 * h)).epsilon(2e-3));
  }
  // T(h) = 4 pi on the regular range
  for (double h = 0.02; h < 0.23; h += 0.03)
    CHECK(prof.deriv_at(h) == doctest::Approx(4 * M_PI).epsilon(0.02));
}

TEST_CASE("p equals a for fields solving the unit-source problem") {
  auto g = disc_grid();
  ScalarField tau = solve_torsion(g);
  AreaProfile prof = area_profile(tau);
  for (int k = 0; k < prof.regular_end; k += 9) {
    CHECK(prof.flux[k] == doctest::Approx(prof.area[k]).epsilon(0.01));
  }
}

TEST_CASE("area profile rejects bad inputs") {
  auto g = disc_grid(64);
  auto neg = sample_field(g, [](double x, double) { return x; }, true);
  CHECK_THROWS_AS(static_cast<void>(area_profile(neg)), std::invalid_argument);
  auto notzb = sample_field(g, [](double, double) { return 1.0; }, false);
  CHECK_THROWS_AS(static_cast<void>(area_profile(notzb)), std::invalid_argument);
}

TEST_CASE("contours of the disc field") {
  auto g = disc_grid();
  auto psi = disc_profile_field(g);
  const double h = 0.125;  // M/2, radius sqrt(1-4h) = sqrt(0.5)
  ContourSet cs = contour_extract(psi, h);
  REQUIRE(cs.curves.size() == 1);
  const double r = std::sqrt(0.5);
  CHECK(cs.curves[0].length == doctest::Approx(2 * M_PI * r).epsilon(0.01));
  CHECK(cs.total_area() == doctest::Approx(M_PI * r * r).epsilon(0.01));
  CHECK(cs.curves[0].enclosed_area > 0);  // counterclockwise: interior on the left

  CHECK_THROWS_AS(static_cast<void>(contour_extract(psi, 0.3)), std::invalid_argument);
  CHECK_THROWS_AS(static_cast<void>(contour_extract(psi, -0.1)), std::invalid_argument);

  // just below the maximum: a single small near-circular loop
  ContourSet top = contour_extract(psi, 0.2495);
  REQUIRE(top.curves.size() == 1);
  const double rt = std::sqrt(1 - 4 * 0.2495);
  CHECK(top.curves[0].length == doctest::Approx(2 * M_PI * rt).epsilon(0.2));
}

TEST_CASE("boundary integrals against the disc closed forms") {
  auto g = disc_grid();
  auto psi = disc_profile_field(g);
  for (double h : {0.05, 0.125, 0.2}) {
    BoundaryIntegral bg = boundary_integral(psi, h, IntegralMode::grad);
    BoundaryIntegral bt = boundary_integral(psi, h, IntegralMode::inv_grad);
    CHECK(!bg.near_critical);
    CHECK(bg.value == doctest::Approx(M_PI * (1 - 4 * h)).epsilon(0.01));
    CHECK(bt.value == doctest::Approx(4 * M_PI).epsilon(0.02));
  }
  BoundaryIntegral near_max = boundary_integral(psi, 0.2499, IntegralMode::grad);
  CHECK(near_max.near_critical);
}

TEST_CASE("independent routes to T and p agree") {
  auto g = disc_grid();
  ScalarField tau = solve_torsion(g);
  AreaProfile prof = area_profile(tau);
  for (double frac : {0.2, 0.4, 0.6}) {
    const double h = frac * prof.max_level;
    BoundaryIntegral bt = boundary_integral(tau, h, IntegralMode::inv_grad);
    BoundaryIntegral bg = boundary_integral(tau, h, IntegralMode::grad);
    CHECK(prof.deriv_at(h) == doctest::Approx(bt.value).epsilon(0.03));
    CHECK(prof.flux_at(h) == doctest::Approx(bg.value).epsilon(0.02));
  }
}

TEST_CASE("critical point classification") {
  auto g = disc_grid(128);
  auto psi = disc_profile_field(g);
  auto cps = critical_points(psi);
  REQUIRE(cps.size() == 1);
  CHECK(cps[0].type == CriticalType::maximum);
  CHECK(std::fabs(cps[0].x) < g->hx);
  CHECK(std::fabs(cps[0].y) < g->hy);

  // two bumps -> two maxima and one saddle
  auto bumps = sample_field(
      g,
      [](double x, double y) {
        const double e = 1 - x * x - y * y;
        const double b1 = std::exp(-8 * ((x - 0.4) * (x - 0.4) + y * y));
        const double b2 = std::exp(-8 * ((x + 0.4) * (x + 0.4) + y * y));
        return e * (b1 + b2);
      },
      true);
  auto cps2 = critical_points(bumps);
  int maxima = 0, saddles = 0;
  for (const auto& cp : cps2) {
    maxima += cp.type == CriticalType::maximum;
    saddles += cp.type == CriticalType::saddle;
  }
  CHECK(maxima == 2);
  CHECK(saddles == 1);

  // cone-like radial field still has exactly one maximum
  auto cone = sample_field(
      g, [](double x, double y) { return 1.0 - std::hypot(x, y); }, true);
  auto cps3 = critical_points(cone);
  int cone_maxima = 0;
  for (const auto& cp : cps3) cone_maxima += cp.type == CriticalType::maximum;
  CHECK(cone_maxima == 1);
}

TEST_CASE("component-restricted profile") {
  auto g = disc_grid(128);
  auto psi = disc_profile_field(g);
  AreaProfile full = area_profile(psi, 60);
  AreaProfile comp = area_profile_component(psi, 60, argmax_node(psi));
  for (int k = 2; k < 58; k += 7)
    CHECK(comp.area[k] == doctest::Approx(full.area[k]).epsilon(0.02));

  auto bumps = sample_field(
      g,
      [](double x, double y) {
        const double e = 1 - x * x - y * y;
        const double b1 = std::exp(-8 * ((x - 0.4) * (x - 0.4) + y * y));
        const double b2 = std::exp(-8 * ((x + 0.4) * (x + 0.4) + y * y));
        return e * (b1 + 0.8 * b2);
      },
      true);
  AreaProfile bc = area_profile_component(bumps, 60, argmax_node(bumps));
  AreaProfile bf = area_profile(bumps, 60);
  // mid levels: the component excludes the second bump
  CHECK(bc.area[20] < 0.9 * bf.area[20]);
}
