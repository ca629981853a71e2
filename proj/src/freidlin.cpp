#include "exitlab/freidlin.hpp"

#include <cmath>
#include <stdexcept>

#include "exitlab/fd_ops.hpp"

namespace exitlab {

double EffectiveProfile::at(double h) const {
  if (h <= levels.front()) return tau_bar.front();
  if (h >= levels.back()) return tau_bar.back();
  const double dh = levels[1] - levels[0];
  const double t = h / dh;
  std::size_t k = std::min(static_cast<std::size_t>(t), tau_bar.size() - 2);
  const double f = t - k;
  return tau_bar[k] * (1 - f) + tau_bar[k + 1] * f;
}

EffectiveProfile effective_profile(const AreaProfile& areas) {
  const std::size_t K = areas.levels.size();
  EffectiveProfile P;
  P.levels = areas.levels;
  P.tau_bar.assign(K, 0.0);

  // p(0) may legitimately vanish (stream functions with degenerate boundary
  // gradient, e.g. reparametrizations f(psi) with f'(0) = 0); the integrand
  // a/p then has an integrable power singularity at h = 0.
  std::vector<double> ratio(K, 0.0);
  for (std::size_t k = 1; k < K; ++k) {
    if (static_cast<int>(k) < areas.regular_end) {
      if (areas.flux[k] <= 0.0)
        throw std::runtime_error("effective_profile: p(h) <= 0 at a regular level");
      ratio[k] = areas.area[k] / areas.flux[k];
    }
  }
  ratio[0] = areas.flux[0] > 0.0 ? areas.area[0] / areas.flux[0] : ratio[1];
  // masked top levels: a and p both vanish linearly at a non-degenerate
  // maximum, so a/p tends to a constant; hold the last regular value
  const double tail = areas.regular_end > 0 ? ratio[areas.regular_end - 1] : 0.0;
  for (std::size_t k = areas.regular_end; k < K; ++k) ratio[k] = tail;

  // Bottom band: product integration with a local power-law model
  // r(h) ~ alpha h^beta, exact on power singularities. Elsewhere: trapezoid.
  const double bottom = 0.05 * areas.max_level;
  for (std::size_t k = 1; k < K; ++k) {
    const double h0 = P.levels[k - 1], h1 = P.levels[k];
    const double r0 = ratio[k - 1], r1 = ratio[k];
    double inc = 0.5 * (h1 - h0) * (r0 + r1);
    if (h1 <= bottom && r1 > 0.0) {
      if (k == 1) {
        // exponent from the first two positive ratios
        if (K > 2 && ratio[2] > 0.0 && r1 > 0.0) {
          double beta = std::log(ratio[2] / r1) / std::log(P.levels[2] / h1);
          beta = std::clamp(beta, -0.95, 5.0);
          inc = r1 * h1 / (beta + 1.0);
        }
      } else if (r0 > 0.0 && h0 > 0.0) {
        double beta = std::log(r1 / r0) / std::log(h1 / h0);
        if (beta > -0.95 && beta < 5.0) inc = (r1 * h1 - r0 * h0) / (beta + 1.0);
      }
    }
    P.tau_bar[k] = P.tau_bar[k - 1] + inc;
  }
  P.max_value = P.tau_bar.back();
  return P;
}

FreidlinResult freidlin_limit(const ScalarField& psi, int level_count) {
  auto cps = critical_points(psi);
  int maxima = 0;
  for (const auto& cp : cps) maxima += cp.type == CriticalType::maximum ? 1 : 0;
  if (cps.size() != 1 || maxima != 1)
    throw std::runtime_error("freidlin_limit: stream function must have a single "
                             "interior critical point (a maximum); found " +
                             std::to_string(cps.size()));

  FreidlinResult R;
  R.areas = area_profile(psi, level_count);
  R.profile = effective_profile(R.areas);
  R.tau_bar = ScalarField(psi.grid, 0.0, true);
  for (std::size_t k = 0; k < psi.v.size(); ++k)
    R.tau_bar.v[k] = R.profile.at(psi.v[k]);
  return R;
}

std::vector<ConvergenceRow> convergence_study(const ScalarField& psi,
                                              const std::vector<double>& amplitudes,
                                              const SolveOptions& base_opts) {
  FreidlinResult lim = freidlin_limit(psi);
  VectorField u = perp_gradient(psi);
  std::vector<ConvergenceRow> rows;
  double prev = -1.0;
  for (double A : amplitudes) {
    SolveOptions opts = base_opts;
    opts.amplitude = A;
    opts.warn_and_proceed = true;
    ExitTimeSolution sol = solve_exit_time(psi.grid, u, opts);
    ConvergenceRow row;
    row.amplitude = A;
    row.scheme = sol.scheme_used;
    row.deviation = kernels::sup_diff(sol.tau.v, lim.tau_bar.v, kernels::default_exec());
    row.flagged = prev >= 0.0 && row.deviation > prev * 1.0001 + 1e-12;
    prev = row.deviation;
    rows.push_back(row);
  }
  return rows;
}

std::vector<LocalityRow> locality_experiment(const ScalarField& psi,
                                             const ScalarField& psi2,
                                             double h0, double h1,
                                             const std::vector<double>& amplitudes) {
  if (!(h0 < h1)) throw std::invalid_argument("locality_experiment: need h0 < h1");
  const DomainGrid& G = *psi.grid;
  double scale = kernels::sup_norm(psi.v, kernels::default_exec());
  for (std::size_t k = 0; k < psi.v.size(); ++k)
    if (psi.v[k] <= h1 && std::fabs(psi.v[k] - psi2.v[k]) > 1e-12 * scale)
      throw std::invalid_argument(
          "locality_experiment: fields differ outside the h1 super-level set");

  VectorField u = perp_gradient(psi);
  VectorField u2 = perp_gradient(psi2);
  std::vector<LocalityRow> rows;
  for (double A : amplitudes) {
    SolveOptions opts;
    opts.amplitude = A;
    opts.warn_and_proceed = true;
    ExitTimeSolution s1 = solve_exit_time(psi.grid, u, opts);
    ExitTimeSolution s2 = solve_exit_time(psi.grid, u2, opts);
    LocalityRow row;
    row.amplitude = A;
    for (std::size_t k = 0; k < G.n_active(); ++k)
      if (psi.v[k] <= h0)
        row.deviation = std::max(row.deviation, std::fabs(s1.tau.v[k] - s2.tau.v[k]));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace exitlab
