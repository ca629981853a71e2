#pragma once

#include <cstddef>
#include <vector>

// Data-parallel building blocks. Every kernel has a serial reference path and
// an OpenMP path; reductions use a fixed chunk decomposition so that both
// paths (and any thread count) produce bit-identical results.

namespace exitlab::kernels {

enum class Exec { serial, openmp };

Exec default_exec();
void set_default_exec(Exec e);
int max_threads();
const char* exec_name(Exec e);

// Number of reduction chunks; fixed so results do not depend on thread count.
inline constexpr std::size_t kReduceChunks = 256;

void fill(std::vector<double>& x, double v, Exec e);
void axpy(double a, const std::vector<double>& x, std::vector<double>& y, Exec e);
void scale_add(std::vector<double>& x, double a, const std::vector<double>& p,
               double b, const std::vector<double>& s, Exec e);  // x += a*p + b*s
// p = r + beta*(p - omega*v)
void update_direction(std::vector<double>& p, const std::vector<double>& r,
                      double beta, double omega, const std::vector<double>& v, Exec e);

double dot(const std::vector<double>& x, const std::vector<double>& y, Exec e);
double sum(const std::vector<double>& x, Exec e);
double sup_norm(const std::vector<double>& x, Exec e);
double sup_diff(const std::vector<double>& x, const std::vector<double>& y, Exec e);

template <class F>
void parallel_for(std::size_t n, Exec e, F&& body) {
  if (e == Exec::openmp) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long i = 0; i < static_cast<long long>(n); ++i)
      body(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < n; ++i) body(i);
  }
}

// Deterministic chunked reduction: combine(i) values are accumulated per chunk
// in index order, chunk partials are summed serially in chunk order.
template <class F>
double reduce_sum(std::size_t n, Exec e, F&& value_at) {
  if (n == 0) return 0.0;
  const std::size_t nchunks = n < kReduceChunks ? n : kReduceChunks;
  std::vector<double> partial(nchunks, 0.0);
  parallel_for(nchunks, e, [&](std::size_t c) {
    const std::size_t lo = c * n / nchunks;
    const std::size_t hi = (c + 1) * n / nchunks;
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += value_at(i);
    partial[c] = acc;
  });
  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

}  // namespace exitlab::kernels
