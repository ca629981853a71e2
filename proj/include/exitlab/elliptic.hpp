#pragma once

#include <optional>
#include <string>

#include "exitlab/grid.hpp"

namespace exitlab {

enum class AdvectionScheme { centered, upwind, automatic };

struct SolveOptions {
  double amplitude = 0.0;                 // A in  -Δτ + A u·∇τ = 1
  AdvectionScheme scheme = AdvectionScheme::automatic;
  double tolerance = 1e-10;               // relative linear residual
  int max_iterations = 5000;
  // The div-free / tangency preconditions are measured on the sampled grid;
  // set this to proceed past a violation (it is then recorded as a warning).
  bool warn_and_proceed = false;
};

struct ExitTimeSolution {
  ScalarField tau;
  double residual = 0.0;      // achieved relative linear residual
  int iterations = 0;
  bool upwind_engaged = false;
  double peclet_max = 0.0;    // A * |u|_inf * h / 2
  double divergence_defect = 0.0;
  double tangency_defect = 0.0;  // max |u·n| / |u|_inf at boundary-adjacent nodes
  bool flow_warning = false;
  std::string scheme_used;
};

// Solves -Δτ + A u·∇τ = 1, τ=0 on ∂Ω, with Shortley-Weller cut cells and
// centered or first-order upwind advection (auto: upwind when the grid
// Péclet number exceeds 1). Throws on linear solver failure or when the flow
// preconditions fail without warn_and_proceed.
ExitTimeSolution solve_exit_time(const std::shared_ptr<const DomainGrid>& domain,
                                 const VectorField& u, const SolveOptions& opts);

// Poisson special case -Δφ = rhs with the same machinery.
ScalarField solve_poisson(const std::shared_ptr<const DomainGrid>& domain,
                          const ScalarField& rhs, double tolerance = 1e-10);

// Zero-flow exit time (the torsion function).
ScalarField solve_torsion(const std::shared_ptr<const DomainGrid>& domain,
                          double tolerance = 1e-10);

}  // namespace exitlab
