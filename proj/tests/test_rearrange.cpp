#include <doctest.h>

#include <cmath>

#include "exitlab/elliptic.hpp"
#include "exitlab/fd_ops.hpp"
#include "exitlab/flows.hpp"
#include "exitlab/grid.hpp"
#include "exitlab/rearrange.hpp"

using namespace exitlab;

namespace {
std::shared_ptr<const DomainGrid> make_grid(ShapeKind kind, int n) {
  DomainSpec s;
  s.kind = kind;
  if (kind == ShapeKind::ellipse) {
    s.a = 2;
    s.b = 1;
  }
  if (kind == ShapeKind::rectangle) {
    s.width = s.height = 1;
    s.cx = s.cy = 0.5;
  }
  s.nx = s.ny = n;
  return build_domain(s);
}
}  // namespace

TEST_CASE("ball exit time closed form") {
  CHECK(ball_exit_time(2, M_PI, 0.0) == doctest::Approx(0.25));
  CHECK(ball_exit_time(3, 4 * M_PI / 3, 0.0) == doctest::Approx(1.0 / 6));
  CHECK(ball_exit_time(2, M_PI, 1.0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(static_cast<void>(ball_exit_time(2, M_PI, 1.5)), std::invalid_argument);
  CHECK(ball_radius(2, M_PI) == doctest::Approx(1.0));
  // L^p closed forms: p=1 on the unit-area... unit disc: pi rho^4/(4 (2)) etc.
  CHECK(ball_exit_time_lp(2, M_PI, INFINITY) == doctest::Approx(0.25));
  CHECK(ball_exit_time_lp(2, M_PI, 1.0) == doctest::Approx(M_PI / 8));
}

TEST_CASE("rearrangement of the disc is the identity") {
  auto g = make_grid(ShapeKind::disc, 256);
  ScalarField tau = solve_torsion(g);
  RadialProfile rad = symmetric_rearrangement(tau);
  CHECK(rad.rho == doctest::Approx(1.0).epsilon(1e-3));
  for (double r : {0.0, 0.3, 0.6, 0.9})
    CHECK(rad.at(r) == doctest::Approx((1 - r * r) / 4).epsilon(0.01));
  CHECK(std::fabs(rad.at(0.0) - 0.25) < 2e-3);
}

TEST_CASE("rearrangement of the ellipse preserves max and measure") {
  auto g = make_grid(ShapeKind::ellipse, 256);
  ScalarField tau = solve_torsion(g);
  RadialProfile rad = symmetric_rearrangement(tau);
  CHECK(rad.rho == doctest::Approx(std::sqrt(2.0)).epsilon(2e-3));
  CHECK(rad.at(0.0) == doctest::Approx(0.4).epsilon(2.5e-3));
  CHECK(rad.gamma.back() == 0.0);
  // non-increasing
  for (std::size_t j = 1; j < rad.gamma.size(); ++j)
    CHECK(rad.gamma[j] <= rad.gamma[j - 1] + 1e-12);
}

TEST_CASE("Lp norms survive rearrangement") {
  auto g = make_grid(ShapeKind::ellipse, 256);
  ScalarField tau = solve_torsion(g);
  RadialProfile rad = symmetric_rearrangement(tau);
  for (double p : {1.0, 2.0, 4.0}) {
    CHECK(rad.lp_norm(p) == doctest::Approx(lp_norm(tau, p)).epsilon(0.01));
  }
  CHECK(rad.lp_norm(INFINITY) == doctest::Approx(lp_norm(tau, INFINITY)).epsilon(0.01));
}

TEST_CASE("pointwise radial bound") {
  for (auto kind : {ShapeKind::disc, ShapeKind::ellipse, ShapeKind::rectangle}) {
    auto g = make_grid(kind, 192);
    ScalarField tau = solve_torsion(g);
    RadialProfile rad = symmetric_rearrangement(tau);
    for (std::size_t j = 0; j < rad.r.size(); ++j) {
      const double bound = (rad.rho * rad.rho - rad.r[j] * rad.r[j]) / 4.0;
      CHECK(rad.gamma[j] <= bound + 0.01 * rad.gamma.front() + 1e-12);
    }
  }
}

TEST_CASE("Lp comparison report") {
  auto gd = make_grid(ShapeKind::disc, 256);
  ScalarField taud = solve_torsion(gd);
  VerificationReport rd = verify_lp_comparison(taud, {1.0, 2.0, INFINITY});
  CHECK(rd.all_pass());
  // the disc saturates the p = inf bound
  CHECK(rd.checks.back().measured == doctest::Approx(rd.checks.back().bound).epsilon(0.01));

  auto ge = make_grid(ShapeKind::ellipse, 256);
  VerificationReport re = verify_lp_comparison(solve_torsion(ge), {INFINITY});
  CHECK(re.all_pass());
  CHECK(re.checks[0].bound - re.checks[0].measured > 0.09);  // margin about 0.1

  // advected cellular flow on the square
  auto gs = make_grid(ShapeKind::rectangle, 160);
  Flow cell = make_flow(gs, "cellular");
  SolveOptions opts;
  opts.amplitude = 100;
  opts.warn_and_proceed = true;
  ExitTimeSolution sol = solve_exit_time(gs, cell.u, opts);
  VerificationReport rs = verify_lp_comparison(sol.tau, {1.0, 2.0, INFINITY});
  CHECK(rs.all_pass());
}

TEST_CASE("a-priori checks") {
  auto g = make_grid(ShapeKind::disc, 192);
  ScalarField tau = solve_torsion(g);
  VerificationReport rep = apriori_checks(tau, tau);
  CHECK(rep.all_pass());

  // deliberate violation: 2x the torsion function breaks the sup bound
  ScalarField two(g, 0.0, true);
  for (std::size_t k = 0; k < tau.v.size(); ++k) two.v[k] = 2 * tau.v[k];
  VerificationReport bad = apriori_checks(two, tau);
  CHECK(!bad.all_pass());
  bool sup_failed = false;
  for (const auto& c : bad.checks)
    if (c.name == "sup_bound" && !c.pass) sup_failed = true;
  CHECK(sup_failed);
}

TEST_CASE("equimeasurability across sampled levels") {
  auto g = make_grid(ShapeKind::ellipse, 192);
  ScalarField tau = solve_torsion(g);
  AreaProfile prof = area_profile(tau);
  RadialProfile rad = symmetric_rearrangement(tau);
  for (int i = 1; i <= 20; ++i) {
    const double h = prof.max_level * i / 22.0;
    // radius where gamma crosses h
    double r_h = 0.0;
    for (std::size_t j = 0; j + 1 < rad.gamma.size(); ++j)
      if (rad.gamma[j] >= h && rad.gamma[j + 1] < h) {
        const double t = (rad.gamma[j] - h) / (rad.gamma[j] - rad.gamma[j + 1]);
        r_h = rad.r[j] + t * (rad.r[j + 1] - rad.r[j]);
        break;
      }
    const double ball_area = M_PI * r_h * r_h;
    CHECK(ball_area == doctest::Approx(prof.area_at(h)).epsilon(0.015));
  }
}
