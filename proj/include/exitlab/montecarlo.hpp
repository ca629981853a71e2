#pragma once

#include <cstdint>
#include <vector>

#include "exitlab/grid.hpp"
#include "exitlab/report.hpp"

namespace exitlab {

struct McConfig {
  double start_x = 0.0, start_y = 0.0;
  double dt = 1e-4;
  long paths = 100000;
  long max_steps_per_path = 0;  // 0: picked from the zero-flow scale (|Omega|)
  std::uint64_t seed = 1;
  double amplitude = 0.0;
  bool antithetic = false;
};

struct McEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;      // sample std / sqrt(N)
  long paths = 0;
  long truncated = 0;
  bool truncation_flagged = false;  // truncated fraction >= 0.1%
};

// Euler-Maruyama sampling of dX = -A u(X) dt + sqrt(2) dB with per-step exit
// test, Brownian-bridge boundary-crossing correction and linear refinement of
// the crossing time. Deterministic for a fixed (seed, config).
McEstimate sample_exit_time(const std::shared_ptr<const DomainGrid>& domain,
                            const VectorField& u, const McConfig& cfg);

struct CrosscheckRow {
  double x = 0.0, y = 0.0;
  double mc = 0.0, mc_stderr = 0.0;
  double pde = 0.0;
  double allowance = 0.0;
  bool pass = false;
};

struct CrosscheckReport {
  std::vector<CrosscheckRow> rows;
  VerificationReport report;
};

// Compares MC estimates against the interpolated PDE solution at the given
// points; pass when |MC - PDE| <= 3 stderr + allowance (2 sqrt(dt)).
CrosscheckReport field_crosscheck(const std::shared_ptr<const DomainGrid>& domain,
                                  const VectorField& u, const ScalarField& tau,
                                  const std::vector<std::pair<double, double>>& points,
                                  McConfig cfg);

}  // namespace exitlab
