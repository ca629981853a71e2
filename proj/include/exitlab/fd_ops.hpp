#pragma once

#include "exitlab/grid.hpp"

// Discrete differential operators on DomainGrid fields. Interior nodes use
// centered second-order stencils; boundary-adjacent nodes use the cut
// fractions (Shortley-Weller) when the field vanishes on ∂Omega, and
// one-sided second-order differences into the interior otherwise.

namespace exitlab {

VectorField gradient(const ScalarField& f);
VectorField perp_gradient(const ScalarField& f);  // (-df/dy, df/dx)
ScalarField laplacian(const ScalarField& f);
ScalarField divergence(const VectorField& v);

// Bilinear interpolation, clipped to Omega; throws std::domain_error when the
// point is outside. Exterior cell corners contribute 0 for zero-boundary
// fields and the nearest active corner value otherwise.
double interpolate(const ScalarField& f, double x, double y);
void interpolate(const VectorField& v, double x, double y, double& ux, double& uy);

// Cut-cell weighted quadrature of w(x) |f|^p over Omega (p = inf -> max).
double lp_norm(const ScalarField& f, double p);
double integral(const ScalarField& f);  // plain cut-cell integral of f

}  // namespace exitlab
