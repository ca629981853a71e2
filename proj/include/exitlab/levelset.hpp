#pragma once

#include <optional>
#include <vector>

#include "exitlab/grid.hpp"

namespace exitlab {

// Level-indexed geometry of a non-negative Dirichlet field psi:
//   area a(h)  = |{psi > h}|          (cut-cell marching-squares area)
//   T(h)       = -a'(h)               (co-area: contour integral of 1/|grad|)
//   flux p(h)  = -int_{psi>h} lap psi (equals the contour integral of |grad|)
// The raw area is monotonized by isotonic regression before differencing.
struct AreaProfile {
  std::vector<double> levels;  // h_0 = 0 < ... < h_K = M
  std::vector<double> area;    // monotone non-increasing
  std::vector<double> area_raw;
  std::vector<double> deriv;   // T_k >= 0
  std::vector<double> flux;    // p_k
  double max_level = 0.0;      // M
  int regular_end = 0;         // first masked index (top 2% of levels)

  double level_cut() const { return levels[regular_end]; }
  double area_at(double h) const;
  double deriv_at(double h) const;
  double flux_at(double h) const;

  double interp(const std::vector<double>& tab, double h) const;
};

// K+1 uniform levels on [0, max psi]. Throws when psi < 0 somewhere, when the
// raw area is non-monotone beyond tolerance, or when the field is not a
// Dirichlet field.
AreaProfile area_profile(const ScalarField& psi, int level_count = 200);

// Restriction to the connected super-level component containing `seed_node`
// (used when an iterate develops several maxima).
AreaProfile area_profile_component(const ScalarField& psi, int level_count,
                                   std::int32_t seed_node);

struct Contour {
  std::vector<double> x, y;      // closed polyline, region psi > h on the left
  std::vector<double> grad_mid;  // |grad psi| at segment midpoints
  double length = 0.0;
  double enclosed_area = 0.0;    // signed (positive = counterclockwise)
};

struct ContourSet {
  double level = 0.0;
  std::vector<Contour> curves;
  double total_area() const;
};

// Marching squares on the node grid (cells split into four triangles, so
// saddle cells are unambiguous). h must lie in (0, max psi).
ContourSet contour_extract(const ScalarField& psi, double h);

enum class IntegralMode { grad, inv_grad };

struct BoundaryIntegral {
  double value = 0.0;
  bool near_critical = false;  // |grad psi| < 1e-3 * max |grad psi| somewhere
};

BoundaryIntegral boundary_integral(const ScalarField& psi, double h, IntegralMode mode);

enum class CriticalType { maximum, minimum, saddle };

struct CriticalPoint {
  double x = 0.0, y = 0.0;
  double value = 0.0;
  CriticalType type = CriticalType::maximum;
};

// Interior critical points by 8-neighbor comparison with a quadratic-fit
// location refinement for extrema.
std::vector<CriticalPoint> critical_points(const ScalarField& psi);

std::int32_t argmax_node(const ScalarField& psi);

}  // namespace exitlab
