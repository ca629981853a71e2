#pragma once

#include <vector>

#include "exitlab/grid.hpp"
#include "exitlab/levelset.hpp"
#include "exitlab/report.hpp"

namespace exitlab {

// Symmetric decreasing rearrangement of a field onto the same-area ball,
// computed by inverting the (monotone) area profile.
struct RadialProfile {
  std::vector<double> r;      // 0 ... rho
  std::vector<double> gamma;  // non-increasing, gamma(rho) = 0
  double rho = 0.0;           // ball radius (area/pi)^(1/2)

  double at(double radius) const;
  double lp_norm(double p) const;  // radial quadrature, p = inf -> gamma(0)
};

RadialProfile symmetric_rearrangement(const ScalarField& tau, int level_count = 200);

// Exit time of a ball of volume V in R^n at a point x with |x| given:
//   (1/2n) [ (V/Gamma_n)^{2/n} - |x|^2 ],  Gamma_n = pi^{n/2} / Gamma(n/2+1).
double ball_exit_time(int n, double volume, double dist);
double ball_radius(int n, double volume);
// L^p norm of the ball exit time over the ball (closed form).
double ball_exit_time_lp(int n, double volume, double p);

// Rearrangement comparison: ||tau||_p <= ||tau^{0,D}||_p with D the
// same-measure ball, checked with the given slack for each p.
VerificationReport verify_lp_comparison(const ScalarField& tau,
                                        const std::vector<double>& p_list,
                                        double slack = 0.01);

// A-priori estimates for a candidate critical point phi (tau0 is the
// zero-flow exit time of the same domain):
//   (1) ||phi||_inf <= |Omega| / 4pi
//   (2) integral |Δφ| = |Omega|
//   (3) integral |Δφ - Δτ0| < |Omega|
// plus the self-consistency a(h) = contour integral of |∇φ| at regular levels.
VerificationReport apriori_checks(const ScalarField& phi, const ScalarField& tau0);

}  // namespace exitlab
