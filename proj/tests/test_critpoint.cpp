#include <doctest.h>

#include <cmath>

#include "exitlab/critpoint.hpp"
#include "exitlab/elliptic.hpp"
#include "exitlab/fd_ops.hpp"
#include "exitlab/grid.hpp"
#include "exitlab/rng.hpp"

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

// compactly supported smooth bump fields, deterministic by seed
VectorField random_bump_field(const std::shared_ptr<const DomainGrid>& g,
                              std::uint64_t seed) {
  SplitMix64 rng = SplitMix64::stream(seed, 0);
  const DomainGrid& G = *g;
  const double ext = std::max((G.nx - 1) * G.hx, (G.ny - 1) * G.hy);
  for (int attempt = 0; attempt < 200; ++attempt) {
    const double cx = G.x0 + rng.uniform() * (G.nx - 1) * G.hx;
    const double cy = G.y0 + rng.uniform() * (G.ny - 1) * G.hy;
    const double rad = (0.1 + 0.15 * rng.uniform()) * ext;
    bool inside = true;
    for (int s = 0; s < 16 && inside; ++s) {
      const double a = 2 * M_PI * s / 16;
      if (G.g(cx + rad * std::cos(a), cy + rad * std::sin(a)) >= -1e-9) inside = false;
    }
    if (!inside) continue;
    const double ax = 2 * rng.uniform() - 1, ay = 2 * rng.uniform() - 1;
    VectorField v(g);
    for (std::size_t k = 0; k < G.n_active(); ++k) {
      const double x = G.xpos(G.node_i(static_cast<std::int32_t>(k)));
      const double y = G.ypos(G.node_j(static_cast<std::int32_t>(k)));
      const double s2 = ((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (rad * rad);
      if (s2 < 1.0) {
        const double b = std::exp(-1.0 / (1.0 - s2) + 1.0);
        v.vx[k] = ax * b;
        v.vy[k] = ay * b;
      }
    }
    return v;
  }
  throw std::runtime_error("random_bump_field: no admissible bump found");
}
}  // namespace

TEST_CASE("the disc solves the critical-point equation") {
  auto g = make_grid(ShapeKind::disc, 256);
  ScalarField tau = solve_torsion(g);
  ResidualField rf = residual(tau);
  CHECK(rf.linf < 0.03);  // -2 lap = 2 and the nonlocal term is 1 pointwise
  CHECK(rf.l2 < 0.01);
}

TEST_CASE("the ellipse does not solve the critical-point equation") {
  auto gd = make_grid(ShapeKind::disc, 192);
  auto ge = make_grid(ShapeKind::ellipse, 192);
  ResidualField rd = residual(solve_torsion(gd));
  ResidualField re = residual(solve_torsion(ge));
  CHECK(re.l2 > 5 * rd.l2);
}

TEST_CASE("radial quartic residual against the closed-form reduction") {
  // phi = (1 - r^4)/8: -2 lap = 4 r^2, lambda(phi)|grad phi|^2 = r^2,
  // so the residual is 3 r^2 - 1 away from the masked cap
  auto g = make_grid(ShapeKind::disc, 256);
  auto phi = sample_field(
      g, [](double x, double y) {
        const double r2 = x * x + y * y;
        return (1.0 - r2 * r2) / 8.0;
      },
      true);
  ResidualField rf = residual(phi);
  const DomainGrid& G = *g;
  double worst = 0;
  for (std::size_t k = 0; k < G.n_active(); ++k) {
    if (rf.masked[k]) continue;
    const double x = G.xpos(G.node_i(static_cast<std::int32_t>(k)));
    const double y = G.ypos(G.node_j(static_cast<std::int32_t>(k)));
    const double r2 = x * x + y * y;
    if (r2 > 0.9) continue;  // skip the outermost ring (gradient one-sided there)
    worst = std::max(worst, std::fabs(rf.r.v[k] - (3 * r2 - 1)));
  }
  CHECK(worst < 0.06);  // 3% of the residual scale (max |3r^2-1| = 2)
}

TEST_CASE("naive iteration on the disc converges to the torsion function") {
  auto g = make_grid(ShapeKind::disc, 128);
  IterationTrace tr = iterate_naive(g, 60);
  CHECK(tr.verdict == IterationVerdict::converged);
  ScalarField tau = solve_torsion(g);
  const double dev = kernels::sup_diff(tr.final_field.v, tau.v, kernels::default_exec());
  CHECK(dev < 0.02 * 0.25);
  CHECK(tr.records.size() >= 2);
  // a-priori suite holds along the way
  for (const auto& rec : tr.records) {
    CHECK(rec.apriori_sup_bound > -1e-6);
    CHECK(rec.apriori_distance < M_PI);
  }
}

TEST_CASE("trace with zero steps holds only the seed") {
  auto g = make_grid(ShapeKind::disc, 64);
  IterationTrace tr = iterate_naive(g, 0);
  CHECK(tr.records.size() == 1);
  CHECK(tr.verdict == IterationVerdict::max_iterations);
}

TEST_CASE("stabilized iteration on the disc (both variants)") {
  auto g = make_grid(ShapeKind::disc, 128);
  ScalarField tau = solve_torsion(g);
  for (auto rp : {Reparam::freidlin, Reparam::advective}) {
    IterationTrace tr = iterate_stabilized(g, 80, rp);
    CHECK(tr.verdict == IterationVerdict::converged);
    const double dev = kernels::sup_diff(tr.final_field.v, tau.v, kernels::default_exec());
    CHECK(dev < 0.02 * 0.25);
  }
}

TEST_CASE("stabilized iteration on the ellipse exceeds the zero-flow exit time") {
  auto g = make_grid(ShapeKind::ellipse, 128);
  IterationTrace fr = iterate_stabilized(g, 200, Reparam::freidlin);
  REQUIRE(fr.verdict == IterationVerdict::converged);
  const double sup_f = kernels::sup_norm(fr.final_field.v, kernels::default_exec());
  CHECK(sup_f > 0.4 + 5e-3);
  CHECK(sup_f <= 0.5 * 1.01);  // |Omega|/(4 pi) = 0.5

  IterationTrace ad = iterate_stabilized(g, 200, Reparam::advective);
  REQUIRE(ad.verdict == IterationVerdict::converged);
  const double sup_a = kernels::sup_norm(ad.final_field.v, kernels::default_exec());
  const double dev = kernels::sup_diff(fr.final_field.v, ad.final_field.v,
                                       kernels::default_exec());
  CHECK(dev < 0.03 * std::max(sup_f, sup_a));
}

TEST_CASE("F and G fields") {
  auto g = make_grid(ShapeKind::disc, 192);
  ScalarField tau = solve_torsion(g);
  FGFields fg = fg_fields(tau);
  AreaProfile prof = area_profile(tau);
  int checked = 0;
  for (std::size_t k = 0; k < tau.v.size(); ++k) {
    if (fg.masked[k] || tau.v[k] < 0.02) continue;
    // p = a: F = 1/a(psi), G = -1/a(psi)
    CHECK(fg.F.v[k] == doctest::Approx(-fg.G.v[k]).epsilon(0.01));
    CHECK(fg.G.v[k] == doctest::Approx(-1.0 / prof.area_at(tau.v[k])).epsilon(0.015));
    CHECK(fg.G.v[k] < 0);
    CHECK(fg.F.v[k] > 0);
    ++checked;
  }
  CHECK(checked > 1000);

  // scaling psi -> 2 psi doubles p at matched points, halving G
  ScalarField two(g, 0.0, true);
  for (std::size_t k = 0; k < tau.v.size(); ++k) two.v[k] = 2 * tau.v[k];
  FGFields fg2 = fg_fields(two);
  int checked2 = 0;
  for (std::size_t k = 0; k < tau.v.size(); ++k) {
    if (fg.masked[k] || fg2.masked[k] || tau.v[k] < 0.02) continue;
    CHECK(fg2.G.v[k] == doctest::Approx(0.5 * fg.G.v[k]).epsilon(0.02));
    ++checked2;
  }
  CHECK(checked2 > 1000);
}

TEST_CASE("variation vanishes on the disc and for flow directions") {
  auto g = make_grid(ShapeKind::disc, 192);
  ScalarField tau = solve_torsion(g);
  // v orthogonal to grad psi pointwise: integrand factor is exactly zero
  VectorField vperp = perp_gradient(tau);
  CHECK(variation(tau, vperp) == doctest::Approx(0.0).epsilon(1e-14));

  const double scale = kernels::sup_norm(tau.v, kernels::default_exec());
  for (std::uint64_t seed : {11u, 22u, 33u, 44u, 55u}) {
    VectorField v = random_bump_field(g, seed);
    CHECK(std::fabs(variation(tau, v)) < 5e-3 * scale);
  }
}

TEST_CASE("variation agrees with the transport finite difference") {
  for (auto kind : {ShapeKind::disc, ShapeKind::ellipse}) {
    auto g = make_grid(kind, 192);
    ScalarField tau = solve_torsion(g);
    const double scale = kernels::sup_norm(tau.v, kernels::default_exec());
    for (std::uint64_t seed : {3u, 7u, 13u, 21u, 34u}) {
      VectorField v = random_bump_field(g, seed);
      const double vol = variation(tau, v);
      const double fd = variation_fd(tau, v, 0.05);
      CHECK(std::fabs(vol - fd) < std::max(0.05 * std::fabs(fd), 5e-3 * scale));
    }
  }
}

TEST_CASE("variation_fd basics") {
  auto g = make_grid(ShapeKind::disc, 128);
  ScalarField tau = solve_torsion(g);
  VectorField zero(g);
  CHECK(variation_fd(tau, zero, 0.05) == 0.0);

  // halving eps keeps the value stable (Richardson-style check)
  VectorField v = random_bump_field(g, 99);
  const double f1 = variation_fd(tau, v, 0.08);
  const double f2 = variation_fd(tau, v, 0.04);
  const double scale = kernels::sup_norm(tau.v, kernels::default_exec());
  CHECK(std::fabs(f1 - f2) < std::max(0.05 * std::fabs(f2), 5e-3 * scale));
}

TEST_CASE("hessian axis ratios at the maximum") {
  auto gd = make_grid(ShapeKind::disc, 192);
  HessianAtMax hd = hessian_at_max(solve_torsion(gd));
  CHECK(hd.axis_ratio == doctest::Approx(1.0).epsilon(0.02));

  auto ge = make_grid(ShapeKind::ellipse, 192);
  HessianAtMax he = hessian_at_max(solve_torsion(ge));
  CHECK(he.axis_ratio == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("monotone cubic remapping") {
  std::vector<double> x{0, 0.25, 0.5, 0.75, 1.0};
  std::vector<double> y{0, 0.1, 0.45, 0.8, 1.0};
  MonotoneCubic mc(x, y);
  CHECK(mc(0.0) == doctest::Approx(0.0));
  CHECK(mc(1.0) == doctest::Approx(1.0));
  CHECK(mc(0.5) == doctest::Approx(0.45));
  double prev = -1;
  for (double t = 0; t <= 1.0; t += 1e-3) {
    const double v = mc(t);
    CHECK(v >= prev - 1e-12);
    prev = v;
  }
  CHECK_THROWS_AS(MonotoneCubic({0.0, 0.0}, {0.0, 1.0}), std::invalid_argument);
}
