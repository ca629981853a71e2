#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "exitlab/kernels.hpp"

using namespace exitlab;
using kernels::Exec;

namespace {
std::vector<double> random_vec(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}
}  // namespace

TEST_CASE("serial and openmp reductions are bit-identical") {
  for (std::size_t n : {1u, 7u, 255u, 256u, 10001u}) {
    auto x = random_vec(n, 1), y = random_vec(n, 2);
    CHECK(kernels::dot(x, y, Exec::serial) == kernels::dot(x, y, Exec::openmp));
    CHECK(kernels::sum(x, Exec::serial) == kernels::sum(x, Exec::openmp));
    CHECK(kernels::sup_norm(x, Exec::serial) == kernels::sup_norm(x, Exec::openmp));
    CHECK(kernels::sup_diff(x, y, Exec::serial) == kernels::sup_diff(x, y, Exec::openmp));
  }
}

TEST_CASE("vector updates match between paths") {
  auto x = random_vec(501, 3), y0 = random_vec(501, 4);
  auto y1 = y0, y2 = y0;
  kernels::axpy(0.37, x, y1, Exec::serial);
  kernels::axpy(0.37, x, y2, Exec::openmp);
  CHECK(y1 == y2);

  auto p1 = y0, p2 = y0;
  kernels::update_direction(p1, x, 0.9, 0.3, y1, Exec::serial);
  kernels::update_direction(p2, x, 0.9, 0.3, y2, Exec::openmp);
  CHECK(p1 == p2);
}

TEST_CASE("dot agrees with a naive sum") {
  auto x = random_vec(1000, 5), y = random_vec(1000, 6);
  double ref = 0;
  for (std::size_t i = 0; i < x.size(); ++i) ref += x[i] * y[i];
  CHECK(kernels::dot(x, y, Exec::serial) == doctest::Approx(ref).epsilon(1e-13));
}
