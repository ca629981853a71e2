#pragma once

#include <string>
#include <vector>

#include "exitlab/grid.hpp"

namespace exitlab {

// 5-point structured sparse operator on the active nodes. Dirichlet cut
// neighbors are eliminated (they contribute zero), so every unknown is an
// interior value.
struct StencilMatrix {
  const DomainGrid* grid = nullptr;
  std::vector<double> c0, cE, cW, cN, cS;

  std::size_t size() const { return c0.size(); }
  void apply(const std::vector<double>& x, std::vector<double>& y,
             kernels::Exec e) const;
};

// ILU(0) for the 5-point pattern; factor/solve sweeps are sequential.
struct Ilu0 {
  const StencilMatrix* A = nullptr;
  std::vector<double> lW, lS, inv_d, uE, uN;

  void factor(const StencilMatrix& m);
  void solve(const std::vector<double>& r, std::vector<double>& z,
             std::vector<double>& tmp) const;
};

struct KrylovResult {
  bool converged = false;
  int iterations = 0;
  double rel_residual = 0.0;
  std::string note;
};

// Preconditioned BiCGSTAB tracking the true residual; stops at
// ||r||_2 <= tol * ||b||_2.
KrylovResult bicgstab(const StencilMatrix& A, const Ilu0& M,
                      const std::vector<double>& b, std::vector<double>& x,
                      double tol, int max_iter, kernels::Exec e);

}  // namespace exitlab
