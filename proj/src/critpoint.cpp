#include "exitlab/critpoint.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "exitlab/elliptic.hpp"
#include "exitlab/fd_ops.hpp"
#include "exitlab/freidlin.hpp"

namespace exitlab {

namespace {

// Least-squares polynomial fit (degree <= 2) through (x, y) samples.
struct Quadratic1D {
  double c0 = 0, c1 = 0, c2 = 0;
  double operator()(double x) const { return c0 + x * (c1 + x * c2); }
};

Quadratic1D fit_quadratic(const std::vector<double>& x, const std::vector<double>& y) {
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0, t0 = 0, t1 = 0, t2 = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i], yi = y[i];
    const double x2 = xi * xi;
    s0 += 1; s1 += xi; s2 += x2; s3 += x2 * xi; s4 += x2 * x2;
    t0 += yi; t1 += xi * yi; t2 += x2 * yi;
  }
  double A[3][4] = {{s0, s1, s2, t0}, {s1, s2, s3, t1}, {s2, s3, s4, t2}};
  for (int c = 0; c < 3; ++c) {
    int piv = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::fabs(A[r][c]) > std::fabs(A[piv][c])) piv = r;
    std::swap(A[c], A[piv]);
    if (std::fabs(A[c][c]) < 1e-300) return {};
    for (int r = 0; r < 3; ++r) {
      if (r == c) continue;
      const double f = A[r][c] / A[c][c];
      for (int k = c; k < 4; ++k) A[r][k] -= f * A[c][k];
    }
  }
  return {A[0][3] / A[0][0], A[1][3] / A[1][1], A[2][3] / A[2][2]};
}

// The nonlocal coefficient of the critical-point equation evaluated on a
// field: t(x) = |∇φ(x)|^2 T(φ(x)) / a(φ(x)). Beyond the level mask the
// level-band mean of t is extrapolated quadratically in h (on the disc t is
// identically 1; near a clean maximum it tends to a constant).
struct UpdateTerm {
  std::vector<double> t;
  std::vector<bool> masked;
};

UpdateTerm update_term(const ScalarField& phi, const AreaProfile& prof) {
  const DomainGrid& G = *phi.grid;
  VectorField grad = gradient(phi);
  const std::size_t n = G.n_active();
  UpdateTerm out;
  out.t.assign(n, 0.0);
  out.masked.assign(n, false);

  const double hcut = prof.level_cut();
  const int K = static_cast<int>(prof.levels.size()) - 1;
  const double dh = prof.levels[1] - prof.levels[0];

  std::vector<double> lam(prof.levels.size(), 0.0);
  for (int k = 0; k < prof.regular_end; ++k)
    lam[k] = prof.deriv[k] / std::max(prof.area[k], 1e-300);
  for (std::size_t k = prof.regular_end; k < lam.size(); ++k)
    lam[k] = lam[prof.regular_end - 1];

  for (std::size_t k = 0; k < n; ++k) {
    const double gg = grad.vx[k] * grad.vx[k] + grad.vy[k] * grad.vy[k];
    out.t[k] = prof.interp(lam, phi.v[k]) * gg;
    out.masked[k] = phi.v[k] > hcut;
  }

  // level-band means over the last 10% of regular levels
  const int w1 = prof.regular_end;
  const int w0 = std::max(0, w1 - std::max(4, K / 10));
  std::vector<double> bsum(w1 - w0, 0.0), bcnt(w1 - w0, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const int b = static_cast<int>(phi.v[k] / dh);
    if (b >= w0 && b < w1) {
      bsum[b - w0] += out.t[k];
      bcnt[b - w0] += 1.0;
    }
  }
  std::vector<double> xs, ys;
  for (int b = 0; b < w1 - w0; ++b)
    if (bcnt[b] > 0) {
      xs.push_back(prof.levels[b + w0] + 0.5 * dh);
      ys.push_back(bsum[b] / bcnt[b]);
    }
  if (xs.size() >= 3) {
    const Quadratic1D q = fit_quadratic(xs, ys);
    for (std::size_t k = 0; k < n; ++k)
      if (out.masked[k]) out.t[k] = q(phi.v[k]);
  } else if (!ys.empty()) {
    for (std::size_t k = 0; k < n; ++k)
      if (out.masked[k]) out.t[k] = ys.back();
  }
  return out;
}

AreaProfile profile_for(const ScalarField& phi, int level_count, bool& multi_max) {
  auto cps = critical_points(phi);
  int maxima = 0;
  for (const auto& cp : cps) maxima += cp.type == CriticalType::maximum ? 1 : 0;
  multi_max = maxima > 1;
  if (multi_max)
    return area_profile_component(phi, level_count, argmax_node(phi));
  return area_profile(phi, level_count);
}

double quad_abs_integral(const ScalarField& f) {
  const DomainGrid& G = *f.grid;
  return kernels::reduce_sum(G.n_active(), kernels::default_exec(),
                             [&](std::size_t k) { return G.quad_w[k] * std::fabs(f.v[k]); });
}

ResidualField residual_with_profile(const ScalarField& phi, const AreaProfile& prof) {
  UpdateTerm ut = update_term(phi, prof);
  ScalarField lap = laplacian(phi);

  const DomainGrid& G = *phi.grid;
  ResidualField out;
  out.r = ScalarField(phi.grid, 0.0, false);
  out.masked = ut.masked;
  double wsum = 0.0, acc = 0.0;
  for (std::size_t k = 0; k < G.n_active(); ++k) {
    if (ut.masked[k]) continue;
    const double r = -2.0 * lap.v[k] - 1.0 - ut.t[k];
    out.r.v[k] = r;
    out.linf = std::max(out.linf, std::fabs(r));
    acc += G.quad_w[k] * r * r;
    wsum += G.quad_w[k];
  }
  out.l2 = wsum > 0 ? std::sqrt(acc / wsum) : 0.0;
  return out;
}

IterationRecord make_record(int step, const ScalarField& phi, const ScalarField& lap_tau0,
                            double domain_area, bool multi_max) {
  IterationRecord rec;
  rec.step = step;
  rec.sup_norm = kernels::sup_norm(phi.v, kernels::default_exec());
  bool mm = false;
  AreaProfile prof = profile_for(phi, 200, mm);
  rec.residual_l2 = residual_with_profile(phi, prof).l2;
  rec.apriori_sup_bound = domain_area / (4 * M_PI) - rec.sup_norm;
  ScalarField lap = laplacian(phi);
  rec.apriori_mass = quad_abs_integral(lap);
  ScalarField diff(phi.grid);
  for (std::size_t k = 0; k < lap.v.size(); ++k) diff.v[k] = lap.v[k] - lap_tau0.v[k];
  rec.apriori_distance = quad_abs_integral(diff);
  rec.multi_max_flagged = multi_max || mm;
  return rec;
}

}  // namespace

ResidualField residual(const ScalarField& phi, int level_count) {
  auto cps = critical_points(phi);
  int maxima = 0;
  for (const auto& cp : cps) maxima += cp.type == CriticalType::maximum ? 1 : 0;
  if (maxima > 1)
    throw std::runtime_error("residual: field has multiple maxima");
  AreaProfile prof = area_profile(phi, level_count);
  return residual_with_profile(phi, prof);
}

IterationTrace iterate_naive(const std::shared_ptr<const DomainGrid>& domain,
                             int max_steps) {
  IterationTrace trace;
  trace.scheme = "naive";
  const double bound = 3.0 * domain->area / (4 * M_PI);

  ScalarField phi = solve_torsion(domain);
  ScalarField lap_tau0 = laplacian(phi);
  trace.records.push_back(make_record(0, phi, lap_tau0, domain->area, false));

  for (int step = 1; step <= max_steps; ++step) {
    bool multi_max = false;
    AreaProfile prof = profile_for(phi, 200, multi_max);
    UpdateTerm ut = update_term(phi, prof);
    ScalarField rhs(domain);
    for (std::size_t k = 0; k < rhs.v.size(); ++k) rhs.v[k] = 0.5 * (1.0 + ut.t[k]);
    ScalarField next = solve_poisson(domain, rhs);

    const double sup = kernels::sup_norm(next.v, kernels::default_exec());
    const double step_sz = kernels::sup_diff(next.v, phi.v, kernels::default_exec());
    phi = std::move(next);
    trace.records.push_back(make_record(step, phi, lap_tau0, domain->area, multi_max));
    if (sup > bound) {
      trace.verdict = IterationVerdict::diverged;
      break;
    }
    if (step_sz < 1e-6 * sup) {
      trace.verdict = IterationVerdict::converged;
      break;
    }
  }
  trace.final_field = std::move(phi);
  return trace;
}

IterationTrace iterate_stabilized(const std::shared_ptr<const DomainGrid>& domain,
                                  int max_steps, Reparam reparam, double amplitude) {
  IterationTrace trace;
  trace.scheme = reparam == Reparam::freidlin ? "freidlin" : "advective";
  const double bound = 3.0 * domain->area / (4 * M_PI);

  ScalarField phi = solve_torsion(domain);
  ScalarField lap_tau0 = laplacian(phi);
  trace.records.push_back(make_record(0, phi, lap_tau0, domain->area, false));

  double A = amplitude;
  if (reparam == Reparam::advective && A <= 0) {
    // default: grid Peclet of about 50 for the initial flow
    VectorField u0 = perp_gradient(phi);
    const double us = u0.sup();
    A = 100.0 / (std::max(domain->hx, domain->hy) * std::max(us, 1e-12));
  }

  for (int step = 1; step <= max_steps; ++step) {
    bool multi_max = false;
    AreaProfile prof = profile_for(phi, 200, multi_max);
    UpdateTerm ut = update_term(phi, prof);
    ScalarField rhs(domain);
    for (std::size_t k = 0; k < rhs.v.size(); ++k) rhs.v[k] = 0.5 * (1.0 + ut.t[k]);
    ScalarField half = solve_poisson(domain, rhs);
    half.zero_boundary = true;

    ScalarField next;
    if (reparam == Reparam::freidlin) {
      bool mm2 = false;
      AreaProfile phalf = profile_for(half, 200, mm2);
      multi_max = multi_max || mm2;
      EffectiveProfile eff = effective_profile(phalf);
      MonotoneCubic remap(eff.levels, eff.tau_bar);
      next = ScalarField(domain, 0.0, true);
      for (std::size_t k = 0; k < next.v.size(); ++k) next.v[k] = remap(half.v[k]);
    } else {
      VectorField u = perp_gradient(half);
      SolveOptions opts;
      opts.amplitude = A;
      opts.warn_and_proceed = true;
      next = solve_exit_time(domain, u, opts).tau;
    }

    const double sup = kernels::sup_norm(next.v, kernels::default_exec());
    const double step_sz = kernels::sup_diff(next.v, phi.v, kernels::default_exec());
    phi = std::move(next);
    trace.records.push_back(make_record(step, phi, lap_tau0, domain->area, multi_max));
    if (sup > bound) {
      trace.verdict = IterationVerdict::diverged;
      break;
    }
    if (step_sz < 1e-6 * sup) {
      trace.verdict = IterationVerdict::converged;
      break;
    }
  }
  trace.final_field = std::move(phi);
  return trace;
}

FGFields fg_fields(const ScalarField& psi, int level_count) {
  auto cps = critical_points(psi);
  int maxima = 0;
  for (const auto& cp : cps) maxima += cp.type == CriticalType::maximum ? 1 : 0;
  if (maxima != 1) throw std::runtime_error("fg_fields: field must have a single maximum");

  AreaProfile prof = area_profile(psi, level_count);
  const double hcut = prof.level_cut();
  std::vector<double> Fh(prof.levels.size()), Gh(prof.levels.size());
  for (int k = 0; k < prof.regular_end; ++k) {
    if (prof.flux[k] <= 0) throw std::runtime_error("fg_fields: p(h) <= 0");
    Gh[k] = -1.0 / prof.flux[k];
    Fh[k] = prof.area[k] * Gh[k] * Gh[k];
  }
  for (std::size_t k = prof.regular_end; k < Fh.size(); ++k) {
    Fh[k] = Fh[prof.regular_end - 1];
    Gh[k] = Gh[prof.regular_end - 1];
  }

  FGFields out;
  out.F = ScalarField(psi.grid);
  out.G = ScalarField(psi.grid);
  out.masked.assign(psi.v.size(), false);
  for (std::size_t k = 0; k < psi.v.size(); ++k) {
    out.F.v[k] = prof.interp(Fh, psi.v[k]);
    out.G.v[k] = prof.interp(Gh, psi.v[k]);
    out.masked[k] = psi.v[k] > hcut;
  }
  return out;
}

double variation(const ScalarField& psi, const VectorField& v, int level_count) {
  const DomainGrid& G = *psi.grid;
  AreaProfile prof = area_profile(psi, level_count);
  const double M = prof.max_level;
  const int K = static_cast<int>(prof.levels.size()) - 1;
  const double dh = prof.levels[1] - prof.levels[0];

  std::vector<double> Fh(K + 1), Gh(K + 1), dFh(K + 1);
  for (int k = 0; k < prof.regular_end; ++k) {
    if (prof.flux[k] <= 0) throw std::runtime_error("variation: p(h) <= 0");
    Gh[k] = -1.0 / prof.flux[k];
    Fh[k] = prof.area[k] * Gh[k] * Gh[k];
  }
  // 1/(M-h) asymptotics through the masked band: fit the constants on the
  // last regular stretch
  double cF = 0, cG = 0;
  {
    int cnt = 0;
    for (int k = std::max(0, prof.regular_end - K / 10); k < prof.regular_end; ++k) {
      cF += Fh[k] * (M - prof.levels[k]);
      cG += Gh[k] * (M - prof.levels[k]);
      ++cnt;
    }
    if (cnt > 0) {
      cF /= cnt;
      cG /= cnt;
    }
  }
  for (int k = prof.regular_end; k <= K; ++k) {
    const double mh = std::max(M - prof.levels[k], 0.5 * dh);
    Fh[k] = cF / mh;
    Gh[k] = cG / mh;
  }
  for (int k = 0; k <= K; ++k) {
    if (k == 0)
      dFh[k] = (Fh[1] - Fh[0]) / dh;
    else if (k == K)
      dFh[k] = (Fh[K] - Fh[K - 1]) / dh;
    else
      dFh[k] = (Fh[k + 1] - Fh[k - 1]) / (2 * dh);
  }

  VectorField grad = gradient(psi);
  ScalarField lap = laplacian(psi);
  return kernels::reduce_sum(G.n_active(), kernels::default_exec(), [&](std::size_t k) {
    const double vdg = v.vx[k] * grad.vx[k] + v.vy[k] * grad.vy[k];
    const double gg = grad.vx[k] * grad.vx[k] + grad.vy[k] * grad.vy[k];
    const double h = psi.v[k];
    const double bracket =
        prof.interp(dFh, h) * gg + 2.0 * prof.interp(Fh, h) * lap.v[k] - prof.interp(Gh, h);
    return G.quad_w[k] * vdg * bracket;
  });
}

double variation_fd(const ScalarField& psi, const VectorField& v, double eps,
                    int level_count) {
  const DomainGrid& G = *psi.grid;
  const std::vector<double> buf = full_buffer(psi, 0.0);
  ScalarField tvx, tvy;
  tvx.grid = psi.grid; tvx.v = v.vx;
  tvy.grid = psi.grid; tvy.v = v.vy;
  const std::vector<double> bvx = full_buffer(tvx, 0.0);
  const std::vector<double> bvy = full_buffer(tvy, 0.0);

  auto lerp = [&](const std::vector<double>& f, double x, double y) {
    double fi = (x - G.x0) / G.hx, fj = (y - G.y0) / G.hy;
    int i = std::clamp(static_cast<int>(std::floor(fi)), 0, G.nx - 2);
    int j = std::clamp(static_cast<int>(std::floor(fj)), 0, G.ny - 2);
    double tx = std::clamp(fi - i, 0.0, 1.0), ty = std::clamp(fj - j, 0.0, 1.0);
    return (1 - tx) * (1 - ty) * f[i + G.nx * j] + tx * (1 - ty) * f[i + 1 + G.nx * j] +
           (1 - tx) * ty * f[i + G.nx * (j + 1)] + tx * ty * f[i + 1 + G.nx * (j + 1)];
  };
  auto vel = [&](double x, double y, double& ux, double& uy) {
    ux = lerp(bvx, x, y);
    uy = lerp(bvy, x, y);
  };
  auto flow_to = [&](double x, double y, double e, double& ox, double& oy) {
    // one RK4 step of dX/de = v(X)
    double k1x, k1y, k2x, k2y, k3x, k3y, k4x, k4y;
    vel(x, y, k1x, k1y);
    vel(x + 0.5 * e * k1x, y + 0.5 * e * k1y, k2x, k2y);
    vel(x + 0.5 * e * k2x, y + 0.5 * e * k2y, k3x, k3y);
    vel(x + e * k3x, y + e * k3y, k4x, k4y);
    ox = x + e / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x);
    oy = y + e / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y);
  };

  auto perturbed_max = [&](double e) {
    ScalarField pe(psi.grid, 0.0, true);
    std::vector<char> left_flags(kernels::kReduceChunks, 0);
    const std::size_t n = G.n_active();
    kernels::parallel_for(n, kernels::default_exec(), [&](std::size_t k) {
      const double x = G.xpos(G.node_i(static_cast<std::int32_t>(k)));
      const double y = G.ypos(G.node_j(static_cast<std::int32_t>(k)));
      double ox, oy;
      flow_to(x, y, e, ox, oy);
      if (G.g(ox, oy) >= 0 && G.g(x, y) < -1e-12)
        left_flags[k * kernels::kReduceChunks / std::max<std::size_t>(n, 1)] = 1;
      pe.v[k] = lerp(buf, ox, oy);
    });
    bool left = false;
    for (char f : left_flags) left |= f != 0;
    if (left)
      throw std::runtime_error("variation_fd: eps too large, the flow map leaves the domain");
    AreaProfile prof = area_profile(pe, level_count);
    return effective_profile(prof).max_value;
  };

  if (v.sup() == 0.0) return 0.0;
  const double plus = perturbed_max(eps);
  const double minus = perturbed_max(-eps);
  return (plus - minus) / (2 * eps);
}

HessianAtMax hessian_at_max(const ScalarField& phi) {
  const DomainGrid& G = *phi.grid;
  const std::int32_t k0 = argmax_node(phi);
  const int i0 = G.node_i(k0), j0 = G.node_j(k0);

  int radius = 2;
  for (; radius >= 1; --radius) {
    bool ok = true;
    for (int dj = -radius; dj <= radius && ok; ++dj)
      for (int di = -radius; di <= radius && ok; ++di)
        if (!G.is_active(i0 + di, j0 + dj)) ok = false;
    if (ok) break;
  }
  if (radius < 1) throw std::runtime_error("hessian_at_max: maximum too close to the boundary");

  // least-squares quadratic q = c0 + c1 x + c2 y + c3 x^2 + c4 xy + c5 y^2
  double AtA[6][6] = {};
  double Atb[6] = {};
  for (int dj = -radius; dj <= radius; ++dj)
    for (int di = -radius; di <= radius; ++di) {
      const double x = di * G.hx, y = dj * G.hy;
      const double row[6] = {1.0, x, y, x * x, x * y, y * y};
      const double val = phi.v[G.active_at(i0 + di, j0 + dj)];
      for (int a = 0; a < 6; ++a) {
        for (int b = 0; b < 6; ++b) AtA[a][b] += row[a] * row[b];
        Atb[a] += row[a] * val;
      }
    }
  // solve the 6x6 system by Gaussian elimination with partial pivoting
  double M[6][7];
  for (int r = 0; r < 6; ++r) {
    for (int c = 0; c < 6; ++c) M[r][c] = AtA[r][c];
    M[r][6] = Atb[r];
  }
  for (int c = 0; c < 6; ++c) {
    int piv = c;
    for (int r = c + 1; r < 6; ++r)
      if (std::fabs(M[r][c]) > std::fabs(M[piv][c])) piv = r;
    std::swap(M[c], M[piv]);
    if (std::fabs(M[c][c]) < 1e-300)
      throw std::runtime_error("hessian_at_max: degenerate quadratic fit");
    for (int r = 0; r < 6; ++r) {
      if (r == c) continue;
      const double f = M[r][c] / M[c][c];
      for (int k = c; k < 7; ++k) M[r][k] -= f * M[c][k];
    }
  }
  const double hxx = 2 * M[3][6] / M[3][3], hxy = M[4][6] / M[4][4], hyy = 2 * M[5][6] / M[5][5];

  HessianAtMax out;
  const double tr = hxx + hyy;
  const double disc = std::sqrt(std::max((hxx - hyy) * (hxx - hyy) + 4 * hxy * hxy, 0.0));
  double l1 = 0.5 * (tr - disc), l2 = 0.5 * (tr + disc);
  if (std::fabs(l1) > std::fabs(l2)) std::swap(l1, l2);
  out.lambda1 = l1;
  out.lambda2 = l2;
  if (std::fabs(l2) < 1e-300)
    throw std::runtime_error("hessian_at_max: degenerate maximum");
  out.axis_ratio = std::sqrt(std::fabs(l1) / std::fabs(l2));
  out.x = G.xpos(i0);
  out.y = G.ypos(j0);
  return out;
}

MonotoneCubic::MonotoneCubic(const std::vector<double>& x, const std::vector<double>& y)
    : x_(x), y_(y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n)
    throw std::invalid_argument("MonotoneCubic: need matching tables of size >= 2");
  std::vector<double> d(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double dx = x[i + 1] - x[i];
    if (!(dx > 0)) throw std::invalid_argument("MonotoneCubic: x must increase");
    d[i] = (y[i + 1] - y[i]) / dx;
  }
  m_.assign(n, 0.0);
  m_[0] = d[0];
  m_[n - 1] = d[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) m_[i] = 0.5 * (d[i - 1] + d[i]);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (d[i] == 0.0) {
      m_[i] = m_[i + 1] = 0.0;
      continue;
    }
    const double a = m_[i] / d[i], b = m_[i + 1] / d[i];
    const double s = a * a + b * b;
    if (s > 9.0) {
      const double t = 3.0 / std::sqrt(s);
      m_[i] = t * a * d[i];
      m_[i + 1] = t * b * d[i];
    }
  }
}

double MonotoneCubic::operator()(double x) const {
  if (x <= x_.front()) return y_.front();
  if (x >= x_.back()) return y_.back();
  std::size_t lo = 0, hi = x_.size() - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    (x_[mid] <= x ? lo : hi) = mid;
  }
  const double hseg = x_[lo + 1] - x_[lo];
  const double t = (x - x_[lo]) / hseg;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y_[lo] + (t3 - 2 * t2 + t) * hseg * m_[lo] +
         (-2 * t3 + 3 * t2) * y_[lo + 1] + (t3 - t2) * hseg * m_[lo + 1];
}

}  // namespace exitlab
