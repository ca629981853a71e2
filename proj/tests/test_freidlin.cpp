#include <doctest.h>

#include <cmath>

#include "exitlab/elliptic.hpp"
#include "exitlab/fd_ops.hpp"
#include "exitlab/freidlin.hpp"
#include "exitlab/grid.hpp"

using namespace exitlab;

namespace {
std::shared_ptr<const DomainGrid> make_grid(ShapeKind kind, int n) {
  DomainSpec s;
  s.kind = kind;
  if (kind == ShapeKind::ellipse) {
    s.a = 2;
    s.b = 1;
  }
  s.nx = s.ny = n;
  return build_domain(s);
}

AreaProfile synthetic_profile(int K, double (*a)(double), double (*p)(double)) {
  AreaProfile prof;
  prof.max_level = 1.0;
  prof.levels.resize(K + 1);
  prof.area.resize(K + 1);
  prof.flux.resize(K + 1);
  prof.deriv.assign(K + 1, 0.0);
  for (int k = 0; k <= K; ++k) {
    prof.levels[k] = static_cast<double>(k) / K;
    prof.area[k] = a(prof.levels[k]);
    prof.flux[k] = p(prof.levels[k]);
  }
  prof.area_raw = prof.area;
  prof.regular_end = K;  // clean synthetic data: only the endpoint is held
  return prof;
}
}  // namespace

TEST_CASE("effective profile on synthetic tables") {
  // a == p -> tau_bar(h) = h exactly
  auto ident = synthetic_profile(
      1000, [](double h) { return M_PI * (1 - h); }, [](double h) { return M_PI * (1 - h); });
  EffectiveProfile e1 = effective_profile(ident);
  for (int k = 0; k <= 1000; k += 100)
    CHECK(e1.tau_bar[k] == doctest::Approx(e1.levels[k]).epsilon(1e-12));

  // a = 1-h, p = 1 -> tau_bar = h - h^2/2 (trapezoid is exact on linear data)
  auto lin = synthetic_profile(
      1000, [](double h) { return 1 - h; }, [](double) { return 1.0; });
  EffectiveProfile e2 = effective_profile(lin);
  for (int k = 0; k <= 1000; k += 125) {
    const double h = e2.levels[k];
    CHECK(std::fabs(e2.tau_bar[k] - (h - h * h / 2)) < 1e-6);
  }

  // p <= 0 at a regular level is an error
  auto bad = synthetic_profile(
      32, [](double h) { return 1 - h; }, [](double h) { return 0.5 - h; });
  CHECK_THROWS_AS(static_cast<void>(effective_profile(bad)), std::runtime_error);
}

TEST_CASE("fields solving the unit-source problem are their own limit") {
  for (auto kind : {ShapeKind::disc, ShapeKind::ellipse}) {
    auto g = make_grid(kind, 256);
    ScalarField tau = solve_torsion(g);
    FreidlinResult R = freidlin_limit(tau);
    const double scale = kernels::sup_norm(tau.v, kernels::default_exec());
    const double dev = kernels::sup_diff(R.tau_bar.v, tau.v, kernels::default_exec());
    CHECK(dev < (kind == ShapeKind::disc ? 1e-3 : 2e-3));
    CHECK(scale == doctest::Approx(kind == ShapeKind::disc ? 0.25 : 0.4).epsilon(5e-3));
  }
}

TEST_CASE("scaling the stream function reparametrizes but preserves the limit") {
  auto g = make_grid(ShapeKind::disc, 256);
  ScalarField tau = solve_torsion(g);
  ScalarField two(g, 0.0, true);
  for (std::size_t k = 0; k < tau.v.size(); ++k) two.v[k] = 2 * tau.v[k];
  FreidlinResult R = freidlin_limit(two);
  // a(h) = pi(1-2h), p = 2a: tau_bar' = 1/2, max = 1/4; tau_bar == tau0
  CHECK(R.profile.max_value == doctest::Approx(0.25).epsilon(5e-3));
  const double dev = kernels::sup_diff(R.tau_bar.v, tau.v, kernels::default_exec());
  CHECK(dev < 2e-3);
}

TEST_CASE("reparametrization invariance of the limit") {
  auto g = make_grid(ShapeKind::ellipse, 192);
  ScalarField tau = solve_torsion(g);
  ScalarField sq(g, 0.0, true);
  for (std::size_t k = 0; k < tau.v.size(); ++k) sq.v[k] = tau.v[k] * tau.v[k];
  FreidlinResult a = freidlin_limit(tau);
  FreidlinResult b = freidlin_limit(sq);
  const double scale = a.profile.max_value;
  const double dev = kernels::sup_diff(a.tau_bar.v, b.tau_bar.v, kernels::default_exec());
  CHECK(dev < 0.01 * scale);
}

TEST_CASE("freidlin limit rejects multi-maximum stream functions") {
  auto g = make_grid(ShapeKind::disc, 96);
  auto bumps = sample_field(
      g,
      [](double x, double y) {
        const double e = 1 - x * x - y * y;
        return e * (std::exp(-8 * ((x - 0.4) * (x - 0.4) + y * y)) +
                    std::exp(-8 * ((x + 0.4) * (x + 0.4) + y * y)));
      },
      true);
  CHECK_THROWS_AS(static_cast<void>(freidlin_limit(bumps)), std::runtime_error);
}

TEST_CASE("convergence study on the disc is flat (exact invariance)") {
  auto g = make_grid(ShapeKind::disc, 128);
  ScalarField tau = solve_torsion(g);
  SolveOptions base;
  base.scheme = AdvectionScheme::centered;
  auto rows = convergence_study(tau, {0.0, 1.0, 100.0, 1000.0}, base);
  REQUIRE(rows.size() == 4);
  // every deviation is the same discretization-floor number
  for (const auto& r : rows) {
    CHECK(r.deviation < 2e-3);
    CHECK(!r.flagged);
  }
  CHECK(rows[0].deviation == doctest::Approx(rows[3].deviation).epsilon(1e-6));
}

TEST_CASE("convergence study decreases on the ellipse within the resolvable range") {
  auto g = make_grid(ShapeKind::ellipse, 160);
  ScalarField tau = solve_torsion(g);
  ScalarField sq(g, 0.0, true);
  for (std::size_t k = 0; k < tau.v.size(); ++k) sq.v[k] = tau.v[k] * tau.v[k];
  auto rows = convergence_study(sq, {1.0, 10.0, 100.0});
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].deviation < rows[0].deviation);
  CHECK(rows[2].deviation < rows[1].deviation);
  CHECK(!rows[1].flagged);
  CHECK(!rows[2].flagged);
}

TEST_CASE("locality of near-maximum stream modifications") {
  auto g = make_grid(ShapeKind::disc, 128);
  ScalarField psi = solve_torsion(g);
  const double M = kernels::sup_norm(psi.v, kernels::default_exec());
  const double h0 = 0.15, h1 = 0.2;
  ScalarField psi2(g, 0.0, true);
  for (std::size_t k = 0; k < psi.v.size(); ++k) {
    const double v = psi.v[k];
    if (v <= h1)
      psi2.v[k] = v;
    else {
      const double t = (v - h1) / (M - h1);
      psi2.v[k] = h1 + (M - h1) * t / (1 + 2 * t);  // smooth squash above h1
    }
  }
  // psi2 == psi outside the h1 super-level set by construction
  auto rows = locality_experiment(psi, psi2, h0, h1, {0.0, 10.0, 100.0, 1000.0});
  REQUIRE(rows.size() == 4);
  // at A = 0 both problems coincide
  CHECK(rows[0].deviation < 1e-9);
  // decreasing toward the discretization floor past the pre-asymptotic range
  CHECK(rows[2].deviation < rows[1].deviation + 1e-4);
  CHECK(rows[3].deviation < rows[2].deviation + 1e-4);

  // identical fields -> identically zero
  auto same = locality_experiment(psi, psi, h0, h1, {10.0});
  CHECK(same[0].deviation == doctest::Approx(0.0).epsilon(1e-12));

  // violated precondition
  ScalarField bad(g, 0.0, true);
  for (std::size_t k = 0; k < psi.v.size(); ++k) bad.v[k] = 0.9 * psi.v[k];
  CHECK_THROWS_AS(static_cast<void>(locality_experiment(psi, bad, h0, h1, {10.0})),
                  std::invalid_argument);
}
