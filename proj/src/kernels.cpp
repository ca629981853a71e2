#include "exitlab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace exitlab::kernels {

namespace {
Exec g_default = [] {
#ifdef _OPENMP
  if (const char* env = std::getenv("EXITLAB_SERIAL"); env && env[0] == '1')
    return Exec::serial;
  return omp_get_max_threads() > 1 ? Exec::openmp : Exec::serial;
#else
  return Exec::serial;
#endif
}();
}  // namespace

Exec default_exec() { return g_default; }
void set_default_exec(Exec e) { g_default = e; }

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

const char* exec_name(Exec e) { return e == Exec::openmp ? "openmp" : "serial"; }

void fill(std::vector<double>& x, double v, Exec e) {
  parallel_for(x.size(), e, [&](std::size_t i) { x[i] = v; });
}

void axpy(double a, const std::vector<double>& x, std::vector<double>& y, Exec e) {
  parallel_for(x.size(), e, [&](std::size_t i) { y[i] += a * x[i]; });
}

void scale_add(std::vector<double>& x, double a, const std::vector<double>& p,
               double b, const std::vector<double>& s, Exec e) {
  parallel_for(x.size(), e, [&](std::size_t i) { x[i] += a * p[i] + b * s[i]; });
}

void update_direction(std::vector<double>& p, const std::vector<double>& r,
                      double beta, double omega, const std::vector<double>& v, Exec e) {
  parallel_for(p.size(), e, [&](std::size_t i) {
    p[i] = r[i] + beta * (p[i] - omega * v[i]);
  });
}

double dot(const std::vector<double>& x, const std::vector<double>& y, Exec e) {
  return reduce_sum(x.size(), e, [&](std::size_t i) { return x[i] * y[i]; });
}

double sum(const std::vector<double>& x, Exec e) {
  return reduce_sum(x.size(), e, [&](std::size_t i) { return x[i]; });
}

double sup_norm(const std::vector<double>& x, Exec e) {
  const std::size_t n = x.size();
  if (n == 0) return 0.0;
  const std::size_t nchunks = n < kReduceChunks ? n : kReduceChunks;
  std::vector<double> partial(nchunks, 0.0);
  parallel_for(nchunks, e, [&](std::size_t c) {
    const std::size_t lo = c * n / nchunks, hi = (c + 1) * n / nchunks;
    double m = 0.0;
    for (std::size_t i = lo; i < hi; ++i) m = std::max(m, std::fabs(x[i]));
    partial[c] = m;
  });
  return *std::max_element(partial.begin(), partial.end());
}

double sup_diff(const std::vector<double>& x, const std::vector<double>& y, Exec e) {
  const std::size_t n = x.size();
  if (n == 0) return 0.0;
  const std::size_t nchunks = n < kReduceChunks ? n : kReduceChunks;
  std::vector<double> partial(nchunks, 0.0);
  parallel_for(nchunks, e, [&](std::size_t c) {
    const std::size_t lo = c * n / nchunks, hi = (c + 1) * n / nchunks;
    double m = 0.0;
    for (std::size_t i = lo; i < hi; ++i) m = std::max(m, std::fabs(x[i] - y[i]));
    partial[c] = m;
  });
  return *std::max_element(partial.begin(), partial.end());
}

}  // namespace exitlab::kernels
