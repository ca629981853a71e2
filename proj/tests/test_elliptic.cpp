#include <doctest.h>

#include <cmath>

#include "exitlab/elliptic.hpp"
#include "exitlab/fd_ops.hpp"
#include "exitlab/grid.hpp"

using namespace exitlab;

namespace {

DomainSpec disc_spec(int n) {
  DomainSpec s;
  s.kind = ShapeKind::disc;
  s.nx = s.ny = n;
  return s;
}

DomainSpec ellipse_spec(int n) {
  DomainSpec s;
  s.kind = ShapeKind::ellipse;
  s.a = 2;
  s.b = 1;
  s.nx = s.ny = n;
  return s;
}

DomainSpec square_spec(int n) {
  DomainSpec s;
  s.kind = ShapeKind::rectangle;
  s.width = s.height = 1.0;
  s.cx = s.cy = 0.5;
  s.nx = s.ny = n;
  return s;
}

double linf_error_vs(const ScalarField& f, double (*exact)(double, double)) {
  const DomainGrid& G = *f.grid;
  double e = 0;
  for (std::size_t k = 0; k < G.n_active(); ++k) {
    double x = G.xpos(G.node_i(static_cast<std::int32_t>(k)));
    double y = G.ypos(G.node_j(static_cast<std::int32_t>(k)));
    e = std::max(e, std::fabs(f.v[k] - exact(x, y)));
  }
  return e;
}

double disc_exact(double x, double y) { return (1 - x * x - y * y) / 4; }
double ellipse_exact(double x, double y) {
  return 0.4 * (1 - x * x / 4 - y * y);
}

// Fourier series for the unit-square torsion function, summed to machine
// precision; the independent oracle for the square tests.
double square_series(double x, double y) {
  double s = 0;
  for (int m = 1; m < 400; m += 2)
    for (int n = 1; n < 400; n += 2) {
      double term = 16.0 * std::sin(m * M_PI * x) * std::sin(n * M_PI * y) /
                    (std::pow(M_PI, 4) * m * n * (m * m + n * n));
      s += term;
    }
  return s;
}

}  // namespace

TEST_CASE("disc torsion function matches the closed form") {
  auto g = build_domain(disc_spec(256));
  auto tau = solve_torsion(g);
  CHECK(linf_error_vs(tau, disc_exact) < 5e-4);
  CHECK(lp_norm(tau, INFINITY) == doctest::Approx(0.25).epsilon(2e-3));
  double mn = 0;
  for (double v : tau.v) mn = std::min(mn, v);
  CHECK(mn > -1e-10);  // maximum principle
}

TEST_CASE("ellipse torsion function matches the closed form") {
  auto g = build_domain(ellipse_spec(256));
  auto tau = solve_torsion(g);
  CHECK(linf_error_vs(tau, ellipse_exact) < 1e-3);
  CHECK(lp_norm(tau, INFINITY) == doctest::Approx(0.4).epsilon(2e-3));
}

TEST_CASE("unit square torsion max against the series oracle") {
  auto g = build_domain(square_spec(128));
  auto tau = solve_torsion(g);
  const double oracle = square_series(0.5, 0.5);
  CHECK(oracle == doctest::Approx(0.07367).epsilon(2e-3));
  CHECK(lp_norm(tau, INFINITY) == doctest::Approx(oracle).epsilon(5e-3));
}

TEST_CASE("grid convergence is second order at A=0") {
  // the disc and ellipse torsion functions are quadratic (the scheme is exact
  // on them); the square has a genuine truncation error to measure
  const double oracle = square_series(0.5, 0.5);
  auto err = [&](int n) {
    auto g = build_domain(square_spec(n));
    auto tau = solve_torsion(g);
    return std::fabs(lp_norm(tau, INFINITY) - oracle);
  };
  double e32 = err(39), e64 = err(71);  // interior spans of 32 and 64 cells
  CHECK(e32 / e64 > 3.0);

  auto gd = build_domain(disc_spec(128));
  CHECK(linf_error_vs(solve_torsion(gd), disc_exact) < 1e-6);
}

TEST_CASE("invariance under the flow of its own stream function") {
  auto g = build_domain(disc_spec(128));
  auto tau0 = solve_torsion(g);
  auto u0 = perp_gradient(tau0);
  for (double A : {1.0, 100.0, 1000.0}) {
    SolveOptions opts;
    opts.amplitude = A;
    opts.scheme = AdvectionScheme::centered;
    opts.warn_and_proceed = true;
    auto sol = solve_exit_time(g, u0, opts);
    double d = 0;
    for (std::size_t k = 0; k < tau0.v.size(); ++k)
      d = std::max(d, std::fabs(sol.tau.v[k] - tau0.v[k]));
    CHECK(d < 1e-8);  // advection term vanishes identically for this pair
  }
}

TEST_CASE("upwinding engages past the Peclet threshold") {
  auto g = build_domain(disc_spec(96));
  auto tau0 = solve_torsion(g);
  auto u0 = perp_gradient(tau0);
  SolveOptions opts;
  opts.amplitude = 5000;
  opts.warn_and_proceed = true;
  auto sol = solve_exit_time(g, u0, opts);
  CHECK(sol.peclet_max > 1.0);
  CHECK(sol.upwind_engaged);
  CHECK(sol.scheme_used == "upwind");
  double mn = 0;
  for (double v : sol.tau.v) mn = std::min(mn, v);
  CHECK(mn > -1e-10);
}

TEST_CASE("grossly non-tangential flow is rejected without the flag") {
  auto g = build_domain(disc_spec(64));
  VectorField u(g);
  for (std::size_t k = 0; k < u.vx.size(); ++k) u.vx[k] = 1.0;
  SolveOptions opts;
  opts.amplitude = 10;
  CHECK_THROWS_AS(static_cast<void>(solve_exit_time(g, u, opts)), std::runtime_error);
  opts.warn_and_proceed = true;
  auto sol = solve_exit_time(g, u, opts);
  CHECK(sol.flow_warning);
  CHECK(sol.tangency_defect > 1e-3);
}

TEST_CASE("option validation") {
  auto g = build_domain(disc_spec(64));
  VectorField u;
  SolveOptions opts;
  opts.tolerance = 1e-3;  // out of contract
  CHECK_THROWS_AS(static_cast<void>(solve_exit_time(g, u, opts)), std::invalid_argument);
  opts.tolerance = 1e-10;
  opts.amplitude = -1;
  CHECK_THROWS_AS(static_cast<void>(solve_exit_time(g, u, opts)), std::invalid_argument);
}
