#include "exitlab/linsys.hpp"

#include <cmath>
#include <stdexcept>

namespace exitlab {

void StencilMatrix::apply(const std::vector<double>& x, std::vector<double>& y,
                          kernels::Exec e) const {
  const DomainGrid& G = *grid;
  kernels::parallel_for(size(), e, [&](std::size_t k) {
    double acc = c0[k] * x[k];
    if (G.nE[k] >= 0) acc += cE[k] * x[G.nE[k]];
    if (G.nW[k] >= 0) acc += cW[k] * x[G.nW[k]];
    if (G.nN[k] >= 0) acc += cN[k] * x[G.nN[k]];
    if (G.nS[k] >= 0) acc += cS[k] * x[G.nS[k]];
    y[k] = acc;
  });
}

void Ilu0::factor(const StencilMatrix& m) {
  A = &m;
  const DomainGrid& G = *m.grid;
  const std::size_t n = m.size();
  lW.assign(n, 0.0);
  lS.assign(n, 0.0);
  inv_d.assign(n, 0.0);
  uE = m.cE;
  uN = m.cN;
  // active indices are row-major, so W and S neighbors precede their node
  for (std::size_t k = 0; k < n; ++k) {
    double d = m.c0[k];
    if (const auto w = G.nW[k]; w >= 0) {
      lW[k] = m.cW[k] * inv_d[w];
      d -= lW[k] * uE[w];
    }
    if (const auto s = G.nS[k]; s >= 0) {
      lS[k] = m.cS[k] * inv_d[s];
      d -= lS[k] * uN[s];
    }
    if (std::fabs(d) < 1e-300)
      throw std::runtime_error("ilu0: zero pivot");
    inv_d[k] = 1.0 / d;
  }
}

void Ilu0::solve(const std::vector<double>& r, std::vector<double>& z,
                 std::vector<double>& tmp) const {
  const DomainGrid& G = *A->grid;
  const std::size_t n = r.size();
  tmp.resize(n);
  z.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    double acc = r[k];
    if (const auto w = G.nW[k]; w >= 0) acc -= lW[k] * tmp[w];
    if (const auto s = G.nS[k]; s >= 0) acc -= lS[k] * tmp[s];
    tmp[k] = acc;
  }
  for (std::size_t k = n; k-- > 0;) {
    double acc = tmp[k];
    if (const auto e = G.nE[k]; e >= 0) acc -= uE[k] * z[e];
    if (const auto nn = G.nN[k]; nn >= 0) acc -= uN[k] * z[nn];
    z[k] = acc * inv_d[k];
  }
}

KrylovResult bicgstab(const StencilMatrix& A, const Ilu0& M,
                      const std::vector<double>& b, std::vector<double>& x,
                      double tol, int max_iter, kernels::Exec e) {
  using namespace kernels;
  const std::size_t n = b.size();
  x.assign(n, 0.0);
  std::vector<double> r = b, rhat = b, p(n, 0.0), v(n, 0.0);
  std::vector<double> phat(n), shat(n), s(n), t(n), tmp(n);

  const double bnorm = std::sqrt(dot(b, b, e));
  if (bnorm == 0.0) return {true, 0, 0.0, "zero rhs"};

  double rho = 1.0, alpha = 1.0, omega = 1.0;
  double rnorm = bnorm;
  KrylovResult res;
  int restarts = 0;

  for (int it = 1; it <= max_iter; ++it) {
    const double rho1 = dot(rhat, r, e);
    if (std::fabs(rho1) < 1e-290 * bnorm * bnorm) {
      // shadow residual became orthogonal; restart from the current iterate
      if (++restarts > 5) {
        res.note = "bicgstab breakdown";
        break;
      }
      A.apply(x, t, e);
      for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - t[k];
      rhat = r;
      fill(p, 0.0, e);
      fill(v, 0.0, e);
      rho = alpha = omega = 1.0;
      continue;
    }
    const double beta = (rho1 / rho) * (alpha / omega);
    update_direction(p, r, beta, omega, v, e);
    M.solve(p, phat, tmp);
    A.apply(phat, v, e);
    const double rhv = dot(rhat, v, e);
    if (std::fabs(rhv) < 1e-290) {
      res.note = "bicgstab breakdown (rhat,v)";
      break;
    }
    alpha = rho1 / rhv;
    for (std::size_t k = 0; k < n; ++k) s[k] = r[k] - alpha * v[k];
    const double snorm = std::sqrt(dot(s, s, e));
    if (snorm <= tol * bnorm) {
      axpy(alpha, phat, x, e);
      rnorm = snorm;
      res.converged = true;
      res.iterations = it;
      break;
    }
    M.solve(s, shat, tmp);
    A.apply(shat, t, e);
    const double tt = dot(t, t, e);
    if (tt == 0.0) {
      res.note = "bicgstab breakdown (t=0)";
      break;
    }
    omega = dot(t, s, e) / tt;
    scale_add(x, alpha, phat, omega, shat, e);
    for (std::size_t k = 0; k < n; ++k) r[k] = s[k] - omega * t[k];
    rho = rho1;
    rnorm = std::sqrt(dot(r, r, e));
    if (!std::isfinite(rnorm)) {
      res.note = "bicgstab produced non-finite residual";
      break;
    }
    res.iterations = it;
    if (rnorm <= tol * bnorm) {
      res.converged = true;
      break;
    }
    if (omega == 0.0) {
      res.note = "bicgstab stagnation (omega=0)";
      break;
    }
  }
  // true residual
  A.apply(x, t, e);
  double rr = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double d = b[k] - t[k];
    rr += d * d;
  }
  res.rel_residual = std::sqrt(rr) / bnorm;
  if (res.converged && res.rel_residual > 10 * tol) res.converged = false;
  return res;
}

}  // namespace exitlab
