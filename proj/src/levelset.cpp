#include "exitlab/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <stdexcept>

#include "exitlab/fd_ops.hpp"

namespace exitlab {

namespace {

constexpr double kMaskFraction = 0.98;  // top 2% of levels treated asymptotically

// Pool-adjacent-violators: least-squares non-increasing fit.
void isotonic_decreasing(std::vector<double>& a) {
  const std::size_t n = a.size();
  std::vector<double> val;
  std::vector<double> weight;
  val.reserve(n);
  weight.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    val.push_back(a[i]);
    weight.push_back(1.0);
    while (val.size() > 1 && val[val.size() - 2] < val.back()) {
      const double w = weight[weight.size() - 2] + weight.back();
      const double v = (val[val.size() - 2] * weight[weight.size() - 2] +
                        val.back() * weight.back()) / w;
      val.pop_back();
      weight.pop_back();
      val.back() = v;
      weight.back() = w;
    }
  }
  std::size_t i = 0;
  for (std::size_t b = 0; b < val.size(); ++b)
    for (std::size_t r = 0; r < static_cast<std::size_t>(weight[b]); ++r) a[i++] = val[b];
}

struct CellTable {
  int nx, ny;
  std::vector<double> corner;  // node values, exterior = 0
  std::vector<double> cmin, cmax, center;

  void build(const ScalarField& psi) {
    const DomainGrid& G = *psi.grid;
    nx = G.nx;
    ny = G.ny;
    corner = full_buffer(psi, 0.0);
    const std::size_t ncell = static_cast<std::size_t>(nx - 1) * (ny - 1);
    cmin.resize(ncell);
    cmax.resize(ncell);
    center.resize(ncell);
    for (int j = 0; j + 1 < ny; ++j)
      for (int i = 0; i + 1 < nx; ++i) {
        const double c00 = corner[i + nx * j], c10 = corner[i + 1 + nx * j];
        const double c11 = corner[i + 1 + nx * (j + 1)], c01 = corner[i + nx * (j + 1)];
        const double cc = 0.25 * (c00 + c10 + c11 + c01);
        const std::size_t c = i + static_cast<std::size_t>(nx - 1) * j;
        cmin[c] = std::min(std::min(c00, c10), std::min(std::min(c11, c01), cc));
        cmax[c] = std::max(std::max(c00, c10), std::max(std::max(c11, c01), cc));
        center[c] = cc;
      }
  }
};

// area of {psi > h} summed over cells
double level_area(const CellTable& T, double h, double hx, double hy,
                  const std::vector<bool>* mask, const DomainGrid* G) {
  const double cell = hx * hy;
  double full = 0.0, cut = 0.0;
  for (int j = 0; j + 1 < T.ny; ++j)
    for (int i = 0; i + 1 < T.nx; ++i) {
      const std::size_t c = i + static_cast<std::size_t>(T.nx - 1) * j;
      if (T.cmax[c] <= h) continue;
      if (!mask && T.cmin[c] > h) {
        full += cell;
        continue;
      }
      auto val = [&](int ii, int jj) {
        const double v = T.corner[ii + T.nx * jj];
        if (!mask) return v;
        const std::int32_t a = G->active_at(ii, jj);
        return (a < 0 || !(*mask)[a]) ? std::min(v, h) : v;
      };
      const double c00 = val(i, j), c10 = val(i + 1, j);
      const double c11 = val(i + 1, j + 1), c01 = val(i, j + 1);
      const double cc = mask ? 0.25 * (c00 + c10 + c11 + c01) : T.center[c];
      if (mask && std::min(std::min(c00, c10), std::min(c11, c01)) > h) {
        full += cell;
        continue;
      }
      cut += negative_area_quad(h - c00, h - c10, h - c11, h - c01, h - cc, hx, hy);
    }
  return full + cut;
}

// Per-node dual-cell corner values (4-node averages); level independent.
struct NodeTable {
  std::vector<double> d00, d10, d11, d01, dmin, dmax;

  void build(const ScalarField& psi, const std::vector<double>& buf) {
    const DomainGrid& G = *psi.grid;
    const std::size_t n = G.n_active();
    d00.resize(n); d10.resize(n); d11.resize(n); d01.resize(n);
    dmin.resize(n); dmax.resize(n);
    auto nodev = [&](int ii, int jj) {
      if (ii < 0 || jj < 0 || ii >= G.nx || jj >= G.ny) return 0.0;
      return buf[ii + G.nx * jj];
    };
    for (std::size_t k = 0; k < n; ++k) {
      const int i = G.node_i(static_cast<std::int32_t>(k));
      const int j = G.node_j(static_cast<std::int32_t>(k));
      const double c = psi.v[k];
      d00[k] = 0.25 * (c + nodev(i - 1, j) + nodev(i, j - 1) + nodev(i - 1, j - 1));
      d10[k] = 0.25 * (c + nodev(i + 1, j) + nodev(i, j - 1) + nodev(i + 1, j - 1));
      d11[k] = 0.25 * (c + nodev(i + 1, j) + nodev(i, j + 1) + nodev(i + 1, j + 1));
      d01[k] = 0.25 * (c + nodev(i - 1, j) + nodev(i, j + 1) + nodev(i - 1, j + 1));
      dmin[k] = std::min(std::min(d00[k], d10[k]), std::min(std::min(d11[k], d01[k]), c));
      dmax[k] = std::max(std::max(d00[k], d10[k]), std::max(std::max(d11[k], d01[k]), c));
    }
  }
};

// dual-cell coverage integral of q over {psi > h}
double level_flux(const ScalarField& psi, const std::vector<double>& q,
                  const std::vector<double>& buf, const NodeTable& N, double h,
                  const std::vector<bool>* mask) {
  const DomainGrid& G = *psi.grid;
  const double cell = G.hx * G.hy;
  double acc = 0.0;
  for (std::size_t k = 0; k < G.n_active(); ++k) {
    if (mask && !(*mask)[k]) continue;
    const double c = psi.v[k];
    double cov;
    if (!mask) {
      if (N.dmax[k] <= h) continue;
      if (N.dmin[k] > h) {
        acc += cell * q[k];
        continue;
      }
      cov = negative_area_quad(h - N.d00[k], h - N.d10[k], h - N.d11[k], h - N.d01[k],
                               h - c, G.hx, G.hy);
    } else {
      const int i = G.node_i(static_cast<std::int32_t>(k));
      const int j = G.node_j(static_cast<std::int32_t>(k));
      auto nodev = [&](int ii, int jj) {
        if (ii < 0 || jj < 0 || ii >= G.nx || jj >= G.ny) return 0.0;
        const std::int32_t a = G.active_at(ii, jj);
        if (a < 0 || !(*mask)[a]) return std::min(buf[ii + G.nx * jj], h);
        return buf[ii + G.nx * jj];
      };
      const double d00 = 0.25 * (c + nodev(i - 1, j) + nodev(i, j - 1) + nodev(i - 1, j - 1));
      const double d10 = 0.25 * (c + nodev(i + 1, j) + nodev(i, j - 1) + nodev(i + 1, j - 1));
      const double d11 = 0.25 * (c + nodev(i + 1, j) + nodev(i, j + 1) + nodev(i + 1, j + 1));
      const double d01 = 0.25 * (c + nodev(i - 1, j) + nodev(i, j + 1) + nodev(i - 1, j + 1));
      const double lo = std::min(std::min(d00, d10), std::min(std::min(d11, d01), c));
      const double hi = std::max(std::max(d00, d10), std::max(std::max(d11, d01), c));
      if (hi <= h)
        cov = 0.0;
      else if (lo > h)
        cov = cell;
      else
        cov = negative_area_quad(h - d00, h - d10, h - d11, h - d01, h - c, G.hx, G.hy);
    }
    acc += cov * q[k];
  }
  return acc;
}

std::vector<bool> component_mask(const ScalarField& psi, double h, std::int32_t seed) {
  const DomainGrid& G = *psi.grid;
  std::vector<bool> in(G.n_active(), false);
  if (psi.v[seed] <= h) return in;
  std::deque<std::int32_t> q{seed};
  in[seed] = true;
  while (!q.empty()) {
    const std::int32_t k = q.front();
    q.pop_front();
    for (std::int32_t nb : {G.nE[k], G.nW[k], G.nN[k], G.nS[k]}) {
      if (nb >= 0 && !in[nb] && psi.v[nb] > h) {
        in[nb] = true;
        q.push_back(nb);
      }
    }
  }
  return in;
}

AreaProfile profile_impl(const ScalarField& psi, int K, const std::int32_t* seed) {
  if (!psi.zero_boundary)
    throw std::invalid_argument("area_profile: field must vanish on the boundary");
  if (K < 8) throw std::invalid_argument("area_profile: need at least 8 levels");
  const DomainGrid& G = *psi.grid;
  double mn = 0.0, mx = 0.0;
  for (double v : psi.v) {
    mn = std::min(mn, v);
    mx = std::max(mx, v);
  }
  if (mn < -1e-12 * std::max(mx, 1.0))
    throw std::invalid_argument("area_profile: field must be non-negative");
  if (!(mx > 0)) throw std::invalid_argument("area_profile: field is identically zero");

  AreaProfile P;
  P.max_level = mx;
  P.levels.resize(K + 1);
  for (int k = 0; k <= K; ++k) P.levels[k] = mx * k / K;
  P.regular_end = static_cast<int>(kMaskFraction * K);

  CellTable T;
  T.build(psi);
  ScalarField lap = laplacian(psi);
  std::vector<double> q(G.n_active());
  for (std::size_t k = 0; k < q.size(); ++k) q[k] = -lap.v[k];
  const std::vector<double> buf = full_buffer(psi, 0.0);
  NodeTable N;
  N.build(psi, buf);

  P.area_raw.assign(K + 1, 0.0);
  P.flux.assign(K + 1, 0.0);
  kernels::parallel_for(static_cast<std::size_t>(K) + 1, kernels::default_exec(),
                        [&](std::size_t k) {
    const double h = P.levels[k];
    std::vector<bool> mask;
    const std::vector<bool>* mp = nullptr;
    if (seed) {
      mask = component_mask(psi, h, *seed);
      mp = &mask;
    }
    if (k == 0 && !seed) {
      P.area_raw[0] = G.area;
      double p0 = 0.0;
      for (std::size_t n = 0; n < G.n_active(); ++n) p0 += G.quad_w[n] * q[n];
      P.flux[0] = p0;
      return;
    }
    P.area_raw[k] = level_area(T, h, G.hx, G.hy, mp, &G);
    P.flux[k] = level_flux(psi, q, buf, N, h, mp);
  });

  // jitter beyond tolerance signals something structurally wrong
  double worst = 0.0;
  for (int k = 0; k < K; ++k) worst = std::max(worst, P.area_raw[k + 1] - P.area_raw[k]);
  if (worst > 0.01 * P.area_raw[0])
    throw std::runtime_error("area_profile: area is non-monotone beyond tolerance");

  P.area = P.area_raw;
  isotonic_decreasing(P.area);

  P.deriv.assign(K + 1, 0.0);
  const double dh = mx / K;
  for (int k = 0; k <= K; ++k) {
    double d;
    if (k == 0)
      d = (P.area[0] - P.area[1]) / dh;
    else if (k == K)
      d = (P.area[K - 1] - P.area[K]) / dh;
    else
      d = (P.area[k - 1] - P.area[k + 1]) / (2 * dh);
    P.deriv[k] = std::max(d, 0.0);
  }
  return P;
}

}  // namespace

double AreaProfile::interp(const std::vector<double>& tab, double h) const {
  if (h <= levels.front()) return tab.front();
  if (h >= levels.back()) return tab.back();
  const double dh = levels[1] - levels[0];
  const double t = h / dh;
  std::size_t k = std::min(static_cast<std::size_t>(t), tab.size() - 2);
  const double f = t - k;
  return tab[k] * (1 - f) + tab[k + 1] * f;
}

double AreaProfile::area_at(double h) const { return interp(area, h); }
double AreaProfile::deriv_at(double h) const { return interp(deriv, h); }
double AreaProfile::flux_at(double h) const { return interp(flux, h); }

AreaProfile area_profile(const ScalarField& psi, int level_count) {
  return profile_impl(psi, level_count, nullptr);
}

AreaProfile area_profile_component(const ScalarField& psi, int level_count,
                                   std::int32_t seed_node) {
  return profile_impl(psi, level_count, &seed_node);
}

// ---- contours -----------------------------------------------------------

namespace {

struct Seg {
  double x0, y0, x1, y1;
};

// canonical crossing point on the segment (xa,ya,va)-(xb,yb,vb)
void cross_point(double xa, double ya, double va, double xb, double yb, double vb,
                 double h, double& px, double& py) {
  if (xb < xa || (xb == xa && yb < ya)) {
    std::swap(xa, xb);
    std::swap(ya, yb);
    std::swap(va, vb);
  }
  const double t = (h - va) / (vb - va);
  px = xa + t * (xb - xa);
  py = ya + t * (yb - ya);
}

// one directed segment per triangle, region v > h on the left;
// vertices (A,B,C) counterclockwise
void tri_segment(double h, const double* vx, const double* vy, const double* vv,
                 std::vector<Seg>& out) {
  const bool in[3] = {vv[0] > h, vv[1] > h, vv[2] > h};
  const int count = in[0] + in[1] + in[2];
  if (count == 0 || count == 3) return;
  int a;  // the lone vertex (inside if count==1, outside if count==2)
  if (count == 1)
    a = in[0] ? 0 : (in[1] ? 1 : 2);
  else
    a = !in[0] ? 0 : (!in[1] ? 1 : 2);
  const int b = (a + 1) % 3, c = (a + 2) % 3;
  double pabx, paby, pcax, pcay;
  cross_point(vx[a], vy[a], vv[a], vx[b], vy[b], vv[b], h, pabx, paby);
  cross_point(vx[c], vy[c], vv[c], vx[a], vy[a], vv[a], h, pcax, pcay);
  if (count == 1)
    out.push_back({pabx, paby, pcax, pcay});  // walk around the lone inside vertex
  else
    out.push_back({pcax, pcay, pabx, paby});
}

}  // namespace

double ContourSet::total_area() const {
  double s = 0.0;
  for (const auto& c : curves) s += c.enclosed_area;
  return s;
}

ContourSet contour_extract(const ScalarField& psi, double h) {
  const DomainGrid& G = *psi.grid;
  double mx = 0.0;
  for (double v : psi.v) mx = std::max(mx, v);
  if (!(h > 0.0) || !(h < mx))
    throw std::invalid_argument("contour_extract: level outside (0, max)");

  const std::vector<double> buf = full_buffer(psi, 0.0);
  VectorField grad = gradient(psi);
  const std::vector<double> gx = [&] {
    ScalarField t; t.grid = psi.grid; t.v = grad.vx; return full_buffer(t, 0.0);
  }();
  const std::vector<double> gy = [&] {
    ScalarField t; t.grid = psi.grid; t.v = grad.vy; return full_buffer(t, 0.0);
  }();

  std::vector<Seg> segs;
  for (int j = 0; j + 1 < G.ny; ++j)
    for (int i = 0; i + 1 < G.nx; ++i) {
      const double c00 = buf[i + G.nx * j], c10 = buf[i + 1 + G.nx * j];
      const double c11 = buf[i + 1 + G.nx * (j + 1)], c01 = buf[i + G.nx * (j + 1)];
      const double lo = std::min(std::min(c00, c10), std::min(c11, c01));
      const double hi = std::max(std::max(c00, c10), std::max(c11, c01));
      if (lo > h || hi <= h) continue;
      const double cc = 0.25 * (c00 + c10 + c11 + c01);
      // corner coordinates must be computed identically in adjacent cells so
      // that shared crossing points match bit-for-bit when chaining
      const double x0 = G.xpos(i), y0 = G.ypos(j);
      const double x1 = G.xpos(i + 1), y1 = G.ypos(j + 1);
      const double xc = 0.5 * (x0 + x1), yc = 0.5 * (y0 + y1);
      const double tx[4][3] = {{x0, x1, xc}, {x1, x1, xc}, {x1, x0, xc}, {x0, x0, xc}};
      const double ty[4][3] = {{y0, y0, yc}, {y0, y1, yc}, {y1, y1, yc}, {y1, y0, yc}};
      const double tv[4][3] = {{c00, c10, cc}, {c10, c11, cc}, {c11, c01, cc}, {c01, c00, cc}};
      for (int t = 0; t < 4; ++t) tri_segment(h, tx[t], ty[t], tv[t], segs);
    }

  // chain directed segments into closed loops (crossing points are computed
  // canonically, so matching endpoints are bit-identical)
  std::map<std::pair<double, double>, std::size_t> by_start;
  for (std::size_t s = 0; s < segs.size(); ++s) by_start[{segs[s].x0, segs[s].y0}] = s;
  std::vector<bool> used(segs.size(), false);

  ContourSet out;
  out.level = h;
  for (std::size_t s0 = 0; s0 < segs.size(); ++s0) {
    if (used[s0]) continue;
    Contour c;
    std::size_t s = s0;
    while (!used[s]) {
      used[s] = true;
      c.x.push_back(segs[s].x0);
      c.y.push_back(segs[s].y0);
      auto it = by_start.find({segs[s].x1, segs[s].y1});
      if (it == by_start.end()) break;  // open chain: degenerate numerics, keep what we have
      s = it->second;
    }
    if (c.x.size() < 3) continue;
    c.x.push_back(c.x.front());
    c.y.push_back(c.y.front());
    double len = 0.0, area2 = 0.0;
    for (std::size_t v = 0; v + 1 < c.x.size(); ++v) {
      const double dx = c.x[v + 1] - c.x[v], dy = c.y[v + 1] - c.y[v];
      len += std::hypot(dx, dy);
      area2 += c.x[v] * c.y[v + 1] - c.x[v + 1] * c.y[v];
      const double mxp = 0.5 * (c.x[v] + c.x[v + 1]);
      const double myp = 0.5 * (c.y[v] + c.y[v + 1]);
      // bilinear |grad psi| at the midpoint from full buffers
      double fi = (mxp - G.x0) / G.hx, fj = (myp - G.y0) / G.hy;
      int ii = std::clamp(static_cast<int>(fi), 0, G.nx - 2);
      int jj = std::clamp(static_cast<int>(fj), 0, G.ny - 2);
      double tx2 = fi - ii, ty2 = fj - jj;
      auto lerp = [&](const std::vector<double>& f) {
        return (1 - tx2) * (1 - ty2) * f[ii + G.nx * jj] + tx2 * (1 - ty2) * f[ii + 1 + G.nx * jj] +
               (1 - tx2) * ty2 * f[ii + G.nx * (jj + 1)] + tx2 * ty2 * f[ii + 1 + G.nx * (jj + 1)];
      };
      c.grad_mid.push_back(std::hypot(lerp(gx), lerp(gy)));
    }
    c.length = len;
    c.enclosed_area = 0.5 * area2;
    out.curves.push_back(std::move(c));
  }
  return out;
}

BoundaryIntegral boundary_integral(const ScalarField& psi, double h, IntegralMode mode) {
  const DomainGrid& G = *psi.grid;
  VectorField grad = gradient(psi);
  double gmax = 0.0;
  for (std::size_t k = 0; k < G.n_active(); ++k)
    gmax = std::max(gmax, std::hypot(grad.vx[k], grad.vy[k]));
  const double eps_g = 1e-3 * gmax;

  ContourSet cs = contour_extract(psi, h);
  BoundaryIntegral out;
  // levels in the top band around the maximum are never regular
  double psimax = 0.0;
  for (double v : psi.v) psimax = std::max(psimax, v);
  if (h > kMaskFraction * psimax) out.near_critical = true;
  for (const auto& c : cs.curves) {
    for (std::size_t v = 0; v + 1 < c.x.size(); ++v) {
      const double len = std::hypot(c.x[v + 1] - c.x[v], c.y[v + 1] - c.y[v]);
      const double gm = c.grad_mid[v];
      if (gm < eps_g) out.near_critical = true;
      out.value += mode == IntegralMode::grad ? len * gm : len / std::max(gm, 0.01 * eps_g);
    }
  }
  return out;
}

std::int32_t argmax_node(const ScalarField& psi) {
  std::int32_t best = 0;
  double bv = psi.v.empty() ? 0.0 : psi.v[0];
  for (std::size_t k = 1; k < psi.v.size(); ++k)
    if (psi.v[k] > bv) {
      bv = psi.v[k];
      best = static_cast<std::int32_t>(k);
    }
  return best;
}

std::vector<CriticalPoint> critical_points(const ScalarField& psi) {
  const DomainGrid& G = *psi.grid;
  const double scale = std::max(kernels::sup_norm(psi.v, kernels::default_exec()), 1e-300);
  const double tie = 1e-12 * scale;

  // Per-node classification. Grid symmetry can put an extremum exactly between
  // nodes (exact value ties), so extrema are detected weakly and tied
  // neighbors are clustered into a single reported point.
  enum : std::uint8_t { none = 0, weak_max, weak_min, saddle_flag };
  std::vector<std::uint8_t> mark(G.n_active(), none);

  const int di[8] = {1, 1, 0, -1, -1, -1, 0, 1};
  const int dj[8] = {0, 1, 1, 1, 0, -1, -1, -1};
  kernels::parallel_for(G.n_active(), kernels::default_exec(), [&](std::size_t k) {
    const int i = G.node_i(static_cast<std::int32_t>(k));
    const int j = G.node_j(static_cast<std::int32_t>(k));
    double d[8];
    for (int r = 0; r < 8; ++r) {
      const std::int32_t nb = G.active_at(i + di[r], j + dj[r]);
      if (nb < 0) return;  // boundary ring: no interior classification
      d[r] = psi.v[nb] - psi.v[k];
    }
    int pos = 0, neg = 0, zero = 0, changes = 0, prev = 0, first = 0;
    for (int r = 0; r < 8; ++r) {
      const int s = d[r] > tie ? 1 : (d[r] < -tie ? -1 : 0);
      pos += s > 0;
      neg += s < 0;
      zero += s == 0;
      if (s == 0) continue;
      if (prev != 0 && s != prev) ++changes;
      if (prev == 0) first = s;
      prev = s;
    }
    if (prev != 0 && first != 0 && prev != first) ++changes;
    if (pos == 0 && neg > 0)
      mark[k] = weak_max;
    else if (neg == 0 && pos > 0)
      mark[k] = weak_min;
    else if (changes >= 4)
      mark[k] = saddle_flag;
  });

  // cluster equal-marked adjacent nodes, one reported point per cluster
  std::vector<CriticalPoint> out;
  std::vector<bool> used(G.n_active(), false);
  for (std::size_t k0 = 0; k0 < G.n_active(); ++k0) {
    if (mark[k0] == none || used[k0]) continue;
    const std::uint8_t kind = mark[k0];
    std::deque<std::int32_t> q{static_cast<std::int32_t>(k0)};
    used[k0] = true;
    double sx = 0, sy = 0;
    double best = psi.v[k0];
    int cnt = 0;
    std::int32_t best_node = static_cast<std::int32_t>(k0);
    while (!q.empty()) {
      const std::int32_t k = q.front();
      q.pop_front();
      const int i = G.node_i(k), j = G.node_j(k);
      sx += G.xpos(i);
      sy += G.ypos(j);
      ++cnt;
      if ((kind == weak_max && psi.v[k] > best) || (kind == weak_min && psi.v[k] < best)) {
        best = psi.v[k];
        best_node = k;
      }
      for (int r = 0; r < 8; ++r) {
        const std::int32_t nb = G.active_at(i + di[r], j + dj[r]);
        if (nb >= 0 && mark[nb] == kind && !used[nb]) {
          used[nb] = true;
          q.push_back(nb);
        }
      }
    }
    CriticalPoint cp;
    cp.type = kind == weak_max    ? CriticalType::maximum
              : kind == weak_min  ? CriticalType::minimum
                                  : CriticalType::saddle;
    cp.x = sx / cnt;
    cp.y = sy / cnt;
    cp.value = psi.v[best_node];
    if (kind != saddle_flag && cnt == 1) {
      // quadratic location refinement when the extremum is a single node
      const int i = G.node_i(best_node), j = G.node_j(best_node);
      const double vE = psi.v[G.active_at(i + 1, j)], vW = psi.v[G.active_at(i - 1, j)];
      const double vN = psi.v[G.active_at(i, j + 1)], vS = psi.v[G.active_at(i, j - 1)];
      const double vNE = psi.v[G.active_at(i + 1, j + 1)], vSW = psi.v[G.active_at(i - 1, j - 1)];
      const double vNW = psi.v[G.active_at(i - 1, j + 1)], vSE = psi.v[G.active_at(i + 1, j - 1)];
      const double v0 = psi.v[best_node];
      const double gx = (vE - vW) / (2 * G.hx), gy = (vN - vS) / (2 * G.hy);
      const double hxx = (vE - 2 * v0 + vW) / (G.hx * G.hx);
      const double hyy = (vN - 2 * v0 + vS) / (G.hy * G.hy);
      const double hxy = (vNE - vNW - vSE + vSW) / (4 * G.hx * G.hy);
      const double det = hxx * hyy - hxy * hxy;
      if (std::fabs(det) > 1e-300) {
        const double ox = std::clamp(-(hyy * gx - hxy * gy) / det, -G.hx, G.hx);
        const double oy = std::clamp(-(-hxy * gx + hxx * gy) / det, -G.hy, G.hy);
        cp.x = G.xpos(i) + ox;
        cp.y = G.ypos(j) + oy;
      }
    }
    out.push_back(cp);
  }
  return out;
}

}  // namespace exitlab
