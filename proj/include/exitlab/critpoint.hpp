#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "exitlab/grid.hpp"
#include "exitlab/levelset.hpp"

namespace exitlab {

// Stationarity machinery for the exit-time functional: the nonlocal equation
//   -2 Δφ = 1 + |∇φ|^2 T(φ)/p(φ),
// its residual, the two fixed-point schemes, the variation functional and the
// structural checks (a-priori bounds, circularity at the maximum).

struct ResidualField {
  ScalarField r;              // 0 on masked nodes
  std::vector<bool> masked;   // top 2% of levels around the maximum
  double l2 = 0.0;            // quadrature L2 norm over unmasked nodes
  double linf = 0.0;
};

ResidualField residual(const ScalarField& phi, int level_count = 200);

struct IterationRecord {
  int step = 0;
  double sup_norm = 0.0;
  double residual_l2 = 0.0;
  double apriori_sup_bound = 0.0;   // |Omega|/(4 pi) - ||phi||_inf  (>= 0 expected)
  double apriori_mass = 0.0;        // integral |Δφ| (should approach |Omega|)
  double apriori_distance = 0.0;    // integral |Δφ - Δτ0| (< |Omega| expected)
  bool multi_max_flagged = false;
};

enum class IterationVerdict { converged, diverged, max_iterations };

struct IterationTrace {
  std::vector<IterationRecord> records;
  IterationVerdict verdict = IterationVerdict::max_iterations;
  ScalarField final_field;
  std::string scheme;
};

IterationTrace iterate_naive(const std::shared_ptr<const DomainGrid>& domain,
                             int max_steps);

enum class Reparam { freidlin, advective };

// amplitude <= 0 picks the default for the advective variant (grid Peclet
// number of about 50).
IterationTrace iterate_stabilized(const std::shared_ptr<const DomainGrid>& domain,
                                  int max_steps, Reparam reparam,
                                  double amplitude = 0.0);

struct FGFields {
  ScalarField F;  // a(psi(x)) * G^2 > 0
  ScalarField G;  // -1/p(psi(x)) < 0
  std::vector<bool> masked;
};

FGFields fg_fields(const ScalarField& psi, int level_count = 200);

// Volume form of the first variation:
//   V = \int (v·∇ψ) [∇F·∇ψ + 2 F Δψ - G]  dx.
double variation(const ScalarField& psi, const VectorField& v, int level_count = 200);

// Independent oracle: transports psi by the flow of v (RK4 + semi-Lagrangian
// resampling) and central-differences the maximum of the Freidlin profile.
double variation_fd(const ScalarField& psi, const VectorField& v, double eps,
                    int level_count = 200);

struct HessianAtMax {
  double lambda1 = 0.0, lambda2 = 0.0;  // eigenvalues, |lambda1| <= |lambda2|
  double axis_ratio = 0.0;              // sqrt(|l1|/|l2|) in (0,1]
  double x = 0.0, y = 0.0;
};

HessianAtMax hessian_at_max(const ScalarField& phi);

// Monotone piecewise-cubic interpolation (Fritsch-Carlson slopes), used for
// the level-value remapping of the stabilized scheme.
class MonotoneCubic {
 public:
  MonotoneCubic(const std::vector<double>& x, const std::vector<double>& y);
  double operator()(double x) const;

 private:
  std::vector<double> x_, y_, m_;
};

}  // namespace exitlab
