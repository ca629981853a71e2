#include "exitlab/elliptic.hpp"

#include <cmath>
#include <stdexcept>

#include "exitlab/fd_ops.hpp"
#include "exitlab/linsys.hpp"

namespace exitlab {

namespace {

struct Assembly {
  StencilMatrix A;
  bool upwind = false;
};

// Row weights of the first-derivative term at one node: value coefficients
// (w0, wP, wM) for arms aP, aM. Must match d1_axis in fd_ops.cpp so that
// discrete flows from perp_gradient are exactly orthogonal to the centered
// advection stencil of the same field.
inline void centered_weights(double aP, double aM, double& w0, double& wP, double& wM) {
  wP = aM / (aP * (aP + aM));
  wM = -aP / (aM * (aP + aM));
  w0 = (aP - aM) / (aP * aM);
}

Assembly assemble(const DomainGrid& G, const VectorField& u, double A_amp, bool upwind) {
  Assembly out;
  StencilMatrix& A = out.A;
  out.upwind = upwind;
  A.grid = &G;
  const std::size_t n = G.n_active();
  A.c0.assign(n, 0.0);
  A.cE.assign(n, 0.0);
  A.cW.assign(n, 0.0);
  A.cN.assign(n, 0.0);
  A.cS.assign(n, 0.0);
  const bool advect = A_amp != 0.0 && !u.vx.empty();
  kernels::parallel_for(n, kernels::default_exec(), [&](std::size_t k) {
    const double aE = G.thE[k] * G.hx, aW = G.thW[k] * G.hx;
    const double aN = G.thN[k] * G.hy, aS = G.thS[k] * G.hy;
    // -Δ (Shortley-Weller)
    A.c0[k] = 2.0 / (aE * aW) + 2.0 / (aN * aS);
    A.cE[k] = -2.0 / (aE * (aE + aW));
    A.cW[k] = -2.0 / (aW * (aE + aW));
    A.cN[k] = -2.0 / (aN * (aN + aS));
    A.cS[k] = -2.0 / (aS * (aN + aS));
    if (!advect) return;
    const double ux = A_amp * u.vx[k], uy = A_amp * u.vy[k];
    if (upwind) {
      if (ux >= 0) {
        A.c0[k] += ux / aW;
        A.cW[k] -= ux / aW;
      } else {
        A.cE[k] += ux / aE;
        A.c0[k] -= ux / aE;
      }
      if (uy >= 0) {
        A.c0[k] += uy / aS;
        A.cS[k] -= uy / aS;
      } else {
        A.cN[k] += uy / aN;
        A.c0[k] -= uy / aN;
      }
    } else {
      double w0, wP, wM;
      centered_weights(aE, aW, w0, wP, wM);
      A.c0[k] += ux * w0;
      A.cE[k] += ux * wP;
      A.cW[k] += ux * wM;
      centered_weights(aN, aS, w0, wP, wM);
      A.c0[k] += uy * w0;
      A.cN[k] += uy * wP;
      A.cS[k] += uy * wM;
    }
  });
  return out;
}

ScalarField run_solve(const std::shared_ptr<const DomainGrid>& domain,
                      const StencilMatrix& A, const std::vector<double>& rhs,
                      double tol, int max_iter, KrylovResult& kres) {
  Ilu0 M;
  M.factor(A);
  std::vector<double> x;
  kres = bicgstab(A, M, rhs, x, tol, max_iter, kernels::default_exec());
  if (!kres.converged)
    throw std::runtime_error("linear solver did not converge: rel_residual=" +
                             std::to_string(kres.rel_residual) + " after " +
                             std::to_string(kres.iterations) + " iterations" +
                             (kres.note.empty() ? "" : " (" + kres.note + ")"));
  for (double v : x)
    if (!std::isfinite(v)) throw std::runtime_error("linear solver produced NaN/Inf");
  ScalarField tau(domain, 0.0, true);
  tau.v = std::move(x);
  return tau;
}

}  // namespace

ExitTimeSolution solve_exit_time(const std::shared_ptr<const DomainGrid>& domain,
                                 const VectorField& u, const SolveOptions& opts) {
  const DomainGrid& G = *domain;
  if (opts.amplitude < 0) throw std::invalid_argument("amplitude must be >= 0");
  if (!(opts.tolerance > 0) || opts.tolerance > 1e-4)
    throw std::invalid_argument("tolerance must be in (0, 1e-4]");

  ExitTimeSolution sol;
  const bool has_flow = opts.amplitude != 0.0 && !u.vx.empty();
  double usup = has_flow ? u.sup() : 0.0;

  if (has_flow && usup > 0) {
    // measured flow preconditions
    ScalarField div = divergence(u);
    double dmax = 0.0;
    for (std::size_t k = 0; k < G.n_active(); ++k)
      if (G.is_deep_interior(static_cast<std::int32_t>(k), 2))
        dmax = std::max(dmax, std::fabs(div.v[k]));
    sol.divergence_defect = dmax * std::min(G.hx, G.hy) / usup;

    double tmax = 0.0;
    for (std::size_t k = 0; k < G.n_active(); ++k) {
      if (G.cls[G.node_of[k]] != NodeClass::boundary_adjacent) continue;
      double nx, ny;
      G.normal(G.xpos(G.node_i(static_cast<std::int32_t>(k))),
               G.ypos(G.node_j(static_cast<std::int32_t>(k))), nx, ny);
      tmax = std::max(tmax, std::fabs(u.vx[k] * nx + u.vy[k] * ny));
    }
    sol.tangency_defect = tmax / usup;

    const bool ok = sol.divergence_defect <= 1e-8 && sol.tangency_defect <= 1e-6;
    if (!ok) {
      if (!opts.warn_and_proceed)
        throw std::runtime_error(
            "flow precondition violated (divergence defect " +
            std::to_string(sol.divergence_defect) + ", tangency defect " +
            std::to_string(sol.tangency_defect) + "); set warn_and_proceed to continue");
      sol.flow_warning = true;
    }
  }

  sol.peclet_max = opts.amplitude * usup * std::max(G.hx, G.hy) / 2.0;
  bool upwind = false;
  switch (opts.scheme) {
    case AdvectionScheme::centered: upwind = false; break;
    case AdvectionScheme::upwind: upwind = true; break;
    case AdvectionScheme::automatic: upwind = sol.peclet_max > 1.0; break;
  }
  sol.upwind_engaged = upwind && has_flow;
  sol.scheme_used = !has_flow ? "centered" : (upwind ? "upwind" : "centered");

  Assembly asmbl = assemble(G, u, has_flow ? opts.amplitude : 0.0, upwind);
  std::vector<double> rhs(G.n_active(), 1.0);
  KrylovResult kres;
  sol.tau = run_solve(domain, asmbl.A, rhs, opts.tolerance, opts.max_iterations, kres);
  sol.residual = kres.rel_residual;
  sol.iterations = kres.iterations;
  return sol;
}

ScalarField solve_poisson(const std::shared_ptr<const DomainGrid>& domain,
                          const ScalarField& rhs, double tolerance) {
  VectorField nou;
  Assembly asmbl = assemble(*domain, nou, 0.0, false);
  KrylovResult kres;
  return run_solve(domain, asmbl.A, rhs.v, tolerance, 5000, kres);
}

ScalarField solve_torsion(const std::shared_ptr<const DomainGrid>& domain,
                          double tolerance) {
  VectorField nou;
  SolveOptions opts;
  opts.tolerance = tolerance;
  return solve_exit_time(domain, nou, opts).tau;
}

}  // namespace exitlab
