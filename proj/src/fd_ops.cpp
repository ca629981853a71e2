#include "exitlab/fd_ops.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "exitlab/kernels.hpp"

namespace exitlab {

namespace {

// First derivative along one axis at a node. Arms aP/aM are the distances to
// the plus/minus neighbor (or Dirichlet cut point) in physical units.
// vP/vM are neighbor values, kP/kM their active indices (-1 = cut).
double d1_axis(const ScalarField& f, std::int32_t k, std::int32_t kP, std::int32_t kM,
               double aP, double aM, int di, int dj) {
  const double v0 = f.v[k];
  const bool haveP = kP >= 0, haveM = kM >= 0;
  if (haveP && haveM) {
    const double vP = f.v[kP], vM = f.v[kM];
    // non-uniform 3-point (arms are equal except next to the boundary)
    return (aM / (aP * (aP + aM))) * vP - (aP / (aM * (aP + aM))) * vM +
           ((aP - aM) / (aP * aM)) * v0;
  }
  if (f.zero_boundary) {
    const double vP = haveP ? f.v[kP] : 0.0;
    const double vM = haveM ? f.v[kM] : 0.0;
    return (aM / (aP * (aP + aM))) * vP - (aP / (aM * (aP + aM))) * vM +
           ((aP - aM) / (aP * aM)) * v0;
  }
  // one-sided second order into the interior, first order fallback
  const DomainGrid& G = *f.grid;
  const int i = G.node_i(k), j = G.node_j(k);
  if (haveP) {
    const std::int32_t kPP = G.active_at(i + 2 * di, j + 2 * dj);
    const double vP = f.v[kP];
    if (kPP >= 0) return (-3.0 * v0 + 4.0 * vP - f.v[kPP]) / (2.0 * aP);
    return (vP - v0) / aP;
  }
  if (haveM) {
    const std::int32_t kMM = G.active_at(i - 2 * di, j - 2 * dj);
    const double vM = f.v[kM];
    if (kMM >= 0) return (3.0 * v0 - 4.0 * vM + f.v[kMM]) / (2.0 * aM);
    return (v0 - vM) / aM;
  }
  return 0.0;  // isolated sliver, both neighbors cut and no boundary value
}

// Second derivative along one axis (Shortley-Weller for Dirichlet fields).
double d2_axis(const ScalarField& f, std::int32_t k, std::int32_t kP, std::int32_t kM,
               double aP, double aM, int di, int dj) {
  const double v0 = f.v[k];
  const bool haveP = kP >= 0, haveM = kM >= 0;
  if ((haveP && haveM) || f.zero_boundary) {
    const double vP = haveP ? f.v[kP] : 0.0;
    const double vM = haveM ? f.v[kM] : 0.0;
    return 2.0 * (vP / (aP * (aP + aM)) + vM / (aM * (aP + aM)) - v0 / (aP * aM));
  }
  // shifted stencil for diagnostics on non-Dirichlet fields
  const DomainGrid& G = *f.grid;
  const int i = G.node_i(k), j = G.node_j(k);
  const int s = haveP ? 1 : -1;
  const std::int32_t k1 = G.active_at(i + s * di, j + s * dj);
  const std::int32_t k2 = G.active_at(i + 2 * s * di, j + 2 * s * dj);
  if (k1 >= 0 && k2 >= 0) {
    const double h = haveP ? aP : aM;
    return (v0 - 2.0 * f.v[k1] + f.v[k2]) / (h * h);
  }
  return 0.0;
}

}  // namespace

VectorField gradient(const ScalarField& f) {
  const DomainGrid& G = *f.grid;
  VectorField out(f.grid);
  kernels::parallel_for(G.n_active(), kernels::default_exec(), [&](std::size_t k) {
    const auto kk = static_cast<std::int32_t>(k);
    out.vx[k] = d1_axis(f, kk, G.nE[k], G.nW[k], G.thE[k] * G.hx, G.thW[k] * G.hx, 1, 0);
    out.vy[k] = d1_axis(f, kk, G.nN[k], G.nS[k], G.thN[k] * G.hy, G.thS[k] * G.hy, 0, 1);
  });
  return out;
}

VectorField perp_gradient(const ScalarField& f) {
  VectorField g = gradient(f);
  VectorField out(f.grid);
  for (std::size_t k = 0; k < g.vx.size(); ++k) {
    out.vx[k] = -g.vy[k];
    out.vy[k] = g.vx[k];
  }
  return out;
}

ScalarField laplacian(const ScalarField& f) {
  const DomainGrid& G = *f.grid;
  ScalarField out(f.grid);
  kernels::parallel_for(G.n_active(), kernels::default_exec(), [&](std::size_t k) {
    const auto kk = static_cast<std::int32_t>(k);
    out.v[k] = d2_axis(f, kk, G.nE[k], G.nW[k], G.thE[k] * G.hx, G.thW[k] * G.hx, 1, 0) +
               d2_axis(f, kk, G.nN[k], G.nS[k], G.thN[k] * G.hy, G.thS[k] * G.hy, 0, 1);
  });
  return out;
}

ScalarField divergence(const VectorField& v) {
  const DomainGrid& G = *v.grid;
  ScalarField fx, fy;
  fx.grid = v.grid; fx.v = v.vx;
  fy.grid = v.grid; fy.v = v.vy;
  ScalarField out(v.grid);
  kernels::parallel_for(G.n_active(), kernels::default_exec(), [&](std::size_t k) {
    const auto kk = static_cast<std::int32_t>(k);
    out.v[k] = d1_axis(fx, kk, G.nE[k], G.nW[k], G.thE[k] * G.hx, G.thW[k] * G.hx, 1, 0) +
               d1_axis(fy, kk, G.nN[k], G.nS[k], G.thN[k] * G.hy, G.thS[k] * G.hy, 0, 1);
  });
  return out;
}

namespace {

double corner_value(const ScalarField& f, int i, int j, std::int32_t nearest) {
  const std::int32_t k = f.grid->active_at(i, j);
  if (k >= 0) return f.v[k];
  if (f.zero_boundary) return 0.0;
  return nearest >= 0 ? f.v[nearest] : 0.0;
}

struct CellLocate {
  int i, j;
  double tx, ty;
};

CellLocate locate(const DomainGrid& G, double x, double y) {
  if (G.g(x, y) >= 0.0)
    throw std::domain_error("interpolate: point outside the domain");
  double fi = (x - G.x0) / G.hx, fj = (y - G.y0) / G.hy;
  int i = std::min(std::max(static_cast<int>(std::floor(fi)), 0), G.nx - 2);
  int j = std::min(std::max(static_cast<int>(std::floor(fj)), 0), G.ny - 2);
  return {i, j, fi - i, fj - j};
}

std::int32_t nearest_active(const DomainGrid& G, const CellLocate& c) {
  const int ci = c.tx < 0.5 ? c.i : c.i + 1;
  const int cj = c.ty < 0.5 ? c.j : c.j + 1;
  std::int32_t k = G.active_at(ci, cj);
  if (k >= 0) return k;
  for (int dj = 0; dj <= 1; ++dj)
    for (int di = 0; di <= 1; ++di)
      if ((k = G.active_at(c.i + di, c.j + dj)) >= 0) return k;
  return -1;
}

}  // namespace

double interpolate(const ScalarField& f, double x, double y) {
  const DomainGrid& G = *f.grid;
  const CellLocate c = locate(G, x, y);
  const std::int32_t near = nearest_active(G, c);
  const double v00 = corner_value(f, c.i, c.j, near);
  const double v10 = corner_value(f, c.i + 1, c.j, near);
  const double v01 = corner_value(f, c.i, c.j + 1, near);
  const double v11 = corner_value(f, c.i + 1, c.j + 1, near);
  return (1 - c.tx) * (1 - c.ty) * v00 + c.tx * (1 - c.ty) * v10 +
         (1 - c.tx) * c.ty * v01 + c.tx * c.ty * v11;
}

void interpolate(const VectorField& v, double x, double y, double& ux, double& uy) {
  ScalarField fx, fy;
  fx.grid = v.grid; fx.v = v.vx;
  fy.grid = v.grid; fy.v = v.vy;
  ux = interpolate(fx, x, y);
  uy = interpolate(fy, x, y);
}

double lp_norm(const ScalarField& f, double p) {
  if (p < 1.0) throw std::invalid_argument("lp_norm: p must be >= 1");
  const DomainGrid& G = *f.grid;
  if (std::isinf(p)) return kernels::sup_norm(f.v, kernels::default_exec());
  const double s = kernels::reduce_sum(G.n_active(), kernels::default_exec(),
                                       [&](std::size_t k) {
                                         return G.quad_w[k] * std::pow(std::fabs(f.v[k]), p);
                                       });
  return std::pow(s, 1.0 / p);
}

double integral(const ScalarField& f) {
  const DomainGrid& G = *f.grid;
  return kernels::reduce_sum(G.n_active(), kernels::default_exec(),
                             [&](std::size_t k) { return G.quad_w[k] * f.v[k]; });
}

}  // namespace exitlab
