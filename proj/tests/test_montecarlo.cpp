#include <doctest.h>

#include <cmath>

#include "exitlab/elliptic.hpp"
#include "exitlab/fd_ops.hpp"
#include "exitlab/grid.hpp"
#include "exitlab/montecarlo.hpp"

using namespace exitlab;
using kernels::Exec;

namespace {
std::shared_ptr<const DomainGrid> disc_grid(int n = 128) {
  DomainSpec s;
  s.kind = ShapeKind::disc;
  s.nx = s.ny = n;
  return build_domain(s);
}
}  // namespace

TEST_CASE("disc center estimate") {
  auto g = disc_grid();
  VectorField zero(g);
  McConfig cfg;
  cfg.paths = 20000;
  cfg.dt = 1e-4;
  cfg.seed = 42;
  McEstimate est = sample_exit_time(g, zero, cfg);
  CHECK(est.truncated == 0);
  CHECK(std::fabs(est.mean - 0.25) < 3 * est.stderr_ + 1e-3);
  CHECK(est.stderr_ < 3e-3);
}

TEST_CASE("weak convergence in dt") {
  auto g = disc_grid();
  VectorField zero(g);
  McConfig cfg;
  cfg.paths = 20000;
  cfg.seed = 7;
  cfg.dt = 4e-4;
  McEstimate coarse = sample_exit_time(g, zero, cfg);
  cfg.dt = 1e-4;
  McEstimate fine = sample_exit_time(g, zero, cfg);
  CHECK(std::fabs(coarse.mean - 0.25) < 3 * coarse.stderr_ + 4 * 4e-4 + 2e-3);
  CHECK(std::fabs(fine.mean - 0.25) < 3 * fine.stderr_ + 1e-3);
}

TEST_CASE("deterministic for fixed seed, across exec policies") {
  auto g = disc_grid(64);
  VectorField zero(g);
  McConfig cfg;
  cfg.paths = 2000;
  cfg.dt = 5e-4;
  cfg.seed = 123;
  McEstimate a = sample_exit_time(g, zero, cfg);
  McEstimate b = sample_exit_time(g, zero, cfg);
  CHECK(a.mean == b.mean);
  CHECK(a.stderr_ == b.stderr_);

  Exec saved = kernels::default_exec();
  kernels::set_default_exec(Exec::serial);
  McEstimate c = sample_exit_time(g, zero, cfg);
  kernels::set_default_exec(Exec::openmp);
  McEstimate d = sample_exit_time(g, zero, cfg);
  kernels::set_default_exec(saved);
  CHECK(c.mean == d.mean);
  CHECK(c.mean == a.mean);

  cfg.seed = 124;
  McEstimate e = sample_exit_time(g, zero, cfg);
  CHECK(e.mean != a.mean);
}

TEST_CASE("invariance of the disc estimate under its own flow") {
  auto g = disc_grid();
  ScalarField tau = solve_torsion(g);
  VectorField u0 = perp_gradient(tau);
  McConfig cfg;
  cfg.paths = 20000;
  cfg.dt = 1e-4;
  cfg.seed = 5;
  cfg.amplitude = 100;
  McEstimate est = sample_exit_time(g, u0, cfg);
  CHECK(std::fabs(est.mean - 0.25) < 3 * est.stderr_ + 2e-3);
}

TEST_CASE("truncation is reported") {
  auto g = disc_grid(64);
  VectorField zero(g);
  McConfig cfg;
  cfg.paths = 1000;
  cfg.dt = 1e-4;
  cfg.max_steps_per_path = 100;  // far below the exit-time scale
  McEstimate est = sample_exit_time(g, zero, cfg);
  CHECK(est.truncated > 0);
  CHECK(est.truncation_flagged);
}

TEST_CASE("input validation") {
  auto g = disc_grid(64);
  VectorField zero(g);
  McConfig cfg;
  cfg.paths = 10;
  CHECK_THROWS_AS(static_cast<void>(sample_exit_time(g, zero, cfg)), std::invalid_argument);
  cfg.paths = 2000;
  cfg.start_x = 2.0;
  CHECK_THROWS_AS(static_cast<void>(sample_exit_time(g, zero, cfg)), std::invalid_argument);
  cfg.start_x = 0.0;
  cfg.dt = 0.0;
  CHECK_THROWS_AS(static_cast<void>(sample_exit_time(g, zero, cfg)), std::invalid_argument);
}

TEST_CASE("crosscheck against the PDE field") {
  auto g = disc_grid();
  VectorField zero(g);
  ScalarField tau = solve_torsion(g);
  McConfig cfg;
  cfg.paths = 10000;
  cfg.dt = 2e-4;
  cfg.seed = 9;
  CrosscheckReport rep = field_crosscheck(
      g, zero, tau, {{0.0, 0.0}, {0.4, 0.2}, {-0.3, 0.5}, {0.0, -0.9}}, cfg);
  for (const auto& row : rep.rows) CHECK(row.pass);
  CHECK(rep.report.all_pass());
}

TEST_CASE("antithetic variant stays unbiased") {
  auto g = disc_grid(96);
  VectorField zero(g);
  McConfig cfg;
  cfg.paths = 20000;
  cfg.dt = 2e-4;
  cfg.seed = 11;
  cfg.antithetic = true;
  McEstimate est = sample_exit_time(g, zero, cfg);
  CHECK(std::fabs(est.mean - 0.25) < 3 * est.stderr_ + 2e-3);
}
