#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "exitlab/kernels.hpp"

namespace exitlab {

enum class ShapeKind { disc, ellipse, rectangle, implicit };

// A 2D domain Omega = { g < 0 } on a uniform node-centered grid.
struct DomainSpec {
  ShapeKind kind = ShapeKind::disc;
  double radius = 1.0;              // disc
  double a = 2.0, b = 1.0;          // ellipse semi-axes
  double width = 1.0, height = 1.0; // rectangle
  double cx = 0.0, cy = 0.0;
  std::string expr;                 // implicit
  int nx = 256, ny = 256;           // node counts per direction
  // Bounding box; if empty (x0 >= x1) it is derived from the shape plus a
  // margin. Rectangles get a margin of whole cells so their sides fall
  // exactly on grid nodes.
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;
  double margin = 0.02;             // bbox padding, fraction of max extent

  std::function<double(double, double)> implicit_function() const;
};

enum class NodeClass : std::uint8_t { exterior = 0, interior = 1, boundary_adjacent = 2 };

class DomainGrid {
 public:
  DomainSpec spec;
  int nx = 0, ny = 0;
  double hx = 0, hy = 0, x0 = 0, y0 = 0;
  double area = 0;  // |Omega| by cut-cell summation

  std::vector<NodeClass> cls;    // nx*ny
  std::vector<std::int32_t> idx; // node -> active index, -1 if exterior
  std::vector<std::int32_t> node_of; // active index -> i + nx*j

  // Per active node: neighbor active indices (-1 when the neighbor is
  // exterior) and arm fractions in (0,1] (distance to the Dirichlet point
  // along the axis, in units of hx / hy).
  std::vector<std::int32_t> nE, nW, nN, nS;
  std::vector<double> thE, thW, thN, thS;
  std::vector<double> quad_w;    // dual-cell ∩ Omega areas (quadrature weights)

  std::function<double(double, double)> g;

  std::size_t n_active() const { return node_of.size(); }
  int node_i(std::int32_t k) const { return node_of[k] % nx; }
  int node_j(std::int32_t k) const { return node_of[k] / nx; }
  double xpos(int i) const { return x0 + i * hx; }
  double ypos(int j) const { return y0 + j * hy; }
  bool is_active(int i, int j) const {
    return i >= 0 && j >= 0 && i < nx && j < ny && idx[i + nx * j] >= 0;
  }
  std::int32_t active_at(int i, int j) const {
    return (i >= 0 && j >= 0 && i < nx && j < ny) ? idx[i + nx * j] : -1;
  }
  // True when every node within `depth` (Chebyshev distance) is active.
  bool is_deep_interior(std::int32_t k, int depth) const;
  // Outward unit normal of the implicit function at (x, y).
  void normal(double x, double y, double& nxv, double& nyv) const;
  double signed_distance(double x, double y) const;  // ~ g/|grad g|
};

// Samples g on the grid, classifies nodes, root-finds the boundary cuts and
// measures |Omega|. Throws std::invalid_argument / std::runtime_error on
// degenerate input (empty or disconnected interior, resolution < 16, zero
// level set touching the bounding box).
std::shared_ptr<const DomainGrid> build_domain(const DomainSpec& spec);

struct ScalarField {
  std::shared_ptr<const DomainGrid> grid;
  std::vector<double> v;        // one value per active node
  bool zero_boundary = false;   // vanishes on ∂Omega (Dirichlet by construction)

  ScalarField() = default;
  explicit ScalarField(std::shared_ptr<const DomainGrid> g, double init = 0.0,
                       bool zb = false)
      : grid(std::move(g)), v(grid->n_active(), init), zero_boundary(zb) {}
  double& operator[](std::size_t k) { return v[k]; }
  double operator[](std::size_t k) const { return v[k]; }
  double max() const { return kernels::sup_norm(v, kernels::default_exec()); }
};

struct VectorField {
  std::shared_ptr<const DomainGrid> grid;
  std::vector<double> vx, vy;

  VectorField() = default;
  explicit VectorField(std::shared_ptr<const DomainGrid> g)
      : grid(std::move(g)), vx(grid->n_active(), 0.0), vy(grid->n_active(), 0.0) {}
  double sup() const;
};

// Samples an analytic function at the active nodes.
ScalarField sample_field(const std::shared_ptr<const DomainGrid>& grid,
                         const std::function<double(double, double)>& f,
                         bool zero_boundary = false);

// Scatters a field to a full nx*ny buffer, `fill` at exterior nodes.
std::vector<double> full_buffer(const ScalarField& f, double fill = 0.0);

// --- cut-cell geometry helpers ------------------------------------------

// Area of { linear interpolant < 0 } in a hx*hy rectangle given the four
// corner values (c00 at (0,0), c10 at (hx,0), c11, c01) and the center value;
// the rectangle is split into four triangles around the center.
double negative_area_quad(double c00, double c10, double c11, double c01,
                          double cc, double hx, double hy);

}  // namespace exitlab
