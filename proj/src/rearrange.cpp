#include "exitlab/rearrange.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "exitlab/fd_ops.hpp"
#include "exitlab/io.hpp"

namespace exitlab {

double RadialProfile::at(double radius) const {
  if (radius <= 0) return gamma.front();
  if (radius >= rho) return 0.0;
  const double dr = r[1] - r[0];
  const double t = radius / dr;
  std::size_t k = std::min(static_cast<std::size_t>(t), gamma.size() - 2);
  const double f = t - k;
  return gamma[k] * (1 - f) + gamma[k + 1] * f;
}

double RadialProfile::lp_norm(double p) const {
  if (std::isinf(p)) return gamma.front();
  // trapezoid on integral of gamma^p * 2 pi r dr
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < r.size(); ++k) {
    const double f0 = std::pow(std::fabs(gamma[k]), p) * 2 * M_PI * r[k];
    const double f1 = std::pow(std::fabs(gamma[k + 1]), p) * 2 * M_PI * r[k + 1];
    acc += 0.5 * (f0 + f1) * (r[k + 1] - r[k]);
  }
  return std::pow(acc, 1.0 / p);
}

RadialProfile symmetric_rearrangement(const ScalarField& tau, int level_count) {
  AreaProfile prof = area_profile(tau, level_count);
  RadialProfile out;
  out.rho = std::sqrt(prof.area.front() / M_PI);
  const int J = level_count;
  out.r.resize(J + 1);
  out.gamma.resize(J + 1);
  // invert the monotone area table: gamma(r) = sup { h : a(h) >= pi r^2 }
  for (int j = 0; j <= J; ++j) {
    const double r = out.rho * j / J;
    const double target = M_PI * r * r;
    const auto& a = prof.area;
    if (target >= a.front()) {
      out.gamma[j] = 0.0;
      out.r[j] = r;
      continue;
    }
    // a is non-increasing; find the last k with a[k] >= target
    std::size_t lo = 0, hi = a.size() - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      (a[mid] >= target ? lo : hi) = mid;
    }
    const double a0 = a[lo], a1 = a[hi];
    double t = a0 - a1 > 0 ? (a0 - target) / (a0 - a1) : 0.0;
    out.gamma[j] = prof.levels[lo] + t * (prof.levels[hi] - prof.levels[lo]);
    out.r[j] = r;
  }
  out.gamma[J] = 0.0;
  // enforce monotonicity against interpolation jitter
  for (int j = 1; j <= J; ++j) out.gamma[j] = std::min(out.gamma[j], out.gamma[j - 1]);
  return out;
}

double ball_radius(int n, double volume) {
  const double gamma_n = std::pow(M_PI, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
  return std::pow(volume / gamma_n, 1.0 / n);
}

double ball_exit_time(int n, double volume, double dist) {
  if (n < 1 || volume <= 0) throw std::invalid_argument("ball_exit_time: need n >= 1, V > 0");
  const double rho = ball_radius(n, volume);
  if (dist > rho * (1 + 1e-12))
    throw std::invalid_argument("ball_exit_time: point outside the ball");
  return (rho * rho - dist * dist) / (2.0 * n);
}

double ball_exit_time_lp(int n, double volume, double p) {
  const double rho = ball_radius(n, volume);
  if (std::isinf(p)) return rho * rho / (2.0 * n);
  if (n != 2) throw std::invalid_argument("ball_exit_time_lp: closed form coded for n = 2");
  // int_D ((rho^2-r^2)/4)^p dx = pi rho^(2p+2) / (4^p (p+1))
  const double val = M_PI * std::pow(rho, 2 * p + 2) / (std::pow(4.0, p) * (p + 1));
  return std::pow(val, 1.0 / p);
}

VerificationReport verify_lp_comparison(const ScalarField& tau,
                                        const std::vector<double>& p_list,
                                        double slack) {
  VerificationReport rep;
  const double V = tau.grid->area;
  for (double p : p_list) {
    const double lhs = lp_norm(tau, p);
    const double rhs = ball_exit_time_lp(2, V, p);
    const bool pass = lhs <= rhs * (1 + slack);
    const std::string pname = std::isinf(p) ? "inf" : fmt_g(p, 6);
    rep.add("lp_comparison_p=" + pname, lhs, rhs, slack, pass, "rearrange");
  }
  return rep;
}

VerificationReport apriori_checks(const ScalarField& phi, const ScalarField& tau0) {
  const DomainGrid& G = *phi.grid;
  VerificationReport rep;
  const double area = G.area;

  const double sup = kernels::sup_norm(phi.v, kernels::default_exec());
  rep.add("sup_bound", sup, area / (4 * M_PI), 1e-9,
          sup <= area / (4 * M_PI) * (1 + 1e-9), "rearrange");

  ScalarField lap = laplacian(phi);
  double mass = 0.0;
  for (std::size_t k = 0; k < lap.v.size(); ++k) mass += G.quad_w[k] * std::fabs(lap.v[k]);
  rep.add("laplacian_mass", mass, area, 0.03,
          std::fabs(mass - area) <= 0.03 * area, "rearrange");

  ScalarField lap0 = laplacian(tau0);
  double dist = 0.0;
  for (std::size_t k = 0; k < lap.v.size(); ++k)
    dist += G.quad_w[k] * std::fabs(lap.v[k] - lap0.v[k]);
  rep.add("laplacian_distance", dist, area, 0.0, dist < area, "rearrange");

  // self-consistency a(h) = contour integral of |∇φ| at a few regular levels
  AreaProfile prof = area_profile(phi, 200);
  double worst = 0.0;
  for (double frac : {0.15, 0.3, 0.5, 0.7, 0.85}) {
    const double h = frac * prof.max_level;
    BoundaryIntegral bi = boundary_integral(phi, h, IntegralMode::grad);
    if (bi.near_critical) continue;
    worst = std::max(worst, std::fabs(bi.value - prof.area_at(h)) /
                                std::max(prof.area_at(h), 1e-300));
  }
  rep.add("freidlin_constraint", worst, 0.0, 0.03, worst <= 0.03, "rearrange");
  return rep;
}

}  // namespace exitlab
