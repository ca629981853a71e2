#pragma once

#include <vector>

#include "exitlab/elliptic.hpp"
#include "exitlab/grid.hpp"
#include "exitlab/levelset.hpp"

namespace exitlab {

// Large-amplitude limit of the exit time for the flow of a stream function:
// constant on level sets of psi, with the 1D profile
//   tau_bar(h) = \int_0^h a(s) / p(s) ds.
struct EffectiveProfile {
  std::vector<double> levels;
  std::vector<double> tau_bar;
  double max_value = 0.0;  // tau_bar(M)

  double at(double h) const;  // monotone piecewise-linear evaluation
};

struct FreidlinResult {
  ScalarField tau_bar;       // composed field
  EffectiveProfile profile;
  AreaProfile areas;
};

// 1D reduction, exposed separately for testing. Throws when p <= 0 at a
// regular level. The integrand a/p over the masked top levels is held at its
// last regular value (both a and p vanish linearly at a non-degenerate max).
EffectiveProfile effective_profile(const AreaProfile& areas);

// Requires a single interior critical point (a maximum).
FreidlinResult freidlin_limit(const ScalarField& psi, int level_count = 200);

struct ConvergenceRow {
  double amplitude = 0.0;
  double deviation = 0.0;      // ||tau^{A u} - tau_bar||_inf
  std::string scheme;
  bool flagged = false;        // deviation increased beyond the previous row
};

// Solves the advected problem for each amplitude with u = perp_gradient(psi)
// and compares against the Freidlin limit.
std::vector<ConvergenceRow> convergence_study(const ScalarField& psi,
                                              const std::vector<double>& amplitudes,
                                              const SolveOptions& base_opts = {});

struct LocalityRow {
  double amplitude = 0.0;
  double deviation = 0.0;  // ||tau_A - tau'_A||_inf outside the h0 super-level set
};

// Lemma-style locality experiment: psi and psi2 must agree outside the h1
// super-level set of psi; reports the far-field deviation per amplitude.
std::vector<LocalityRow> locality_experiment(const ScalarField& psi,
                                             const ScalarField& psi2,
                                             double h0, double h1,
                                             const std::vector<double>& amplitudes);

}  // namespace exitlab
