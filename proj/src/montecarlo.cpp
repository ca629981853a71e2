#include "exitlab/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "exitlab/fd_ops.hpp"
#include "exitlab/io.hpp"
#include "exitlab/rng.hpp"

namespace exitlab {

void SplitMix64::normal_pair(double& z0, double& z1) {
  const double u1 = uniform(), u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  z0 = r * std::cos(2 * M_PI * u2);
  z1 = r * std::sin(2 * M_PI * u2);
}

namespace {

struct FlowSampler {
  const DomainGrid* G = nullptr;
  std::vector<double> bx, by;
  bool zero = true;

  void build(const VectorField& u, double amplitude) {
    G = u.grid ? u.grid.get() : nullptr;
    zero = amplitude == 0.0 || !u.grid || u.sup() == 0.0;
    if (zero) return;
    ScalarField tx, ty;
    tx.grid = u.grid; tx.v = u.vx;
    ty.grid = u.grid; ty.v = u.vy;
    bx = full_buffer(tx, 0.0);
    by = full_buffer(ty, 0.0);
    for (auto& v : bx) v *= -amplitude;  // drift of the SDE is -A u
    for (auto& v : by) v *= -amplitude;
  }

  // bilinear with exterior corners at zero: advection decays across the
  // one-cell boundary band instead of extrapolating
  void drift(double x, double y, double& dx, double& dy) const {
    if (zero) {
      dx = dy = 0.0;
      return;
    }
    double fi = (x - G->x0) / G->hx, fj = (y - G->y0) / G->hy;
    int i = std::clamp(static_cast<int>(std::floor(fi)), 0, G->nx - 2);
    int j = std::clamp(static_cast<int>(std::floor(fj)), 0, G->ny - 2);
    const double tx = std::clamp(fi - i, 0.0, 1.0), ty = std::clamp(fj - j, 0.0, 1.0);
    const std::size_t n00 = i + static_cast<std::size_t>(G->nx) * j;
    dx = (1 - tx) * (1 - ty) * bx[n00] + tx * (1 - ty) * bx[n00 + 1] +
         (1 - tx) * ty * bx[n00 + G->nx] + tx * ty * bx[n00 + G->nx + 1];
    dy = (1 - tx) * (1 - ty) * by[n00] + tx * (1 - ty) * by[n00 + 1] +
         (1 - tx) * ty * by[n00 + G->nx] + tx * ty * by[n00 + G->nx + 1];
  }
};

}  // namespace

McEstimate sample_exit_time(const std::shared_ptr<const DomainGrid>& domain,
                            const VectorField& u, const McConfig& cfg) {
  const DomainGrid& G = *domain;
  if (!(cfg.dt > 0)) throw std::invalid_argument("montecarlo: dt must be positive");
  if (cfg.paths < 1000) throw std::invalid_argument("montecarlo: need at least 1000 paths");
  if (G.g(cfg.start_x, cfg.start_y) >= 0)
    throw std::invalid_argument("montecarlo: start point is not interior");

  FlowSampler flow;
  flow.build(u, cfg.amplitude);

  long max_steps = cfg.max_steps_per_path;
  if (max_steps <= 0)
    max_steps = static_cast<long>(50.0 * (G.area / (4 * M_PI)) / cfg.dt) + 1000;

  // Brownian bridge band: per-step normal displacement scale is sqrt(2 dt)
  const double sigma_step = std::sqrt(2.0 * cfg.dt);
  // conservative gradient bound of g to translate g-values into distances
  double grad_bound = 0.0;
  for (int s = 0; s < 64; ++s) {
    const double x = G.x0 + (G.nx - 1) * G.hx * (s % 8) / 7.0;
    const double y = G.y0 + (G.ny - 1) * G.hy * (s / 8) / 7.0;
    double nx, ny;
    const double d = 1e-6 * std::max(G.hx, G.hy);
    nx = (G.g(x + d, y) - G.g(x - d, y)) / (2 * d);
    ny = (G.g(x, y + d) - G.g(x, y - d)) / (2 * d);
    grad_bound = std::max(grad_bound, std::hypot(nx, ny));
  }
  grad_bound = std::max(grad_bound, 1e-6);
  const double band_g = 6.0 * sigma_step * grad_bound;

  const long n_paths = cfg.paths;
  std::vector<double> times(n_paths, 0.0);
  std::vector<char> truncated(n_paths, 0);

  kernels::parallel_for(static_cast<std::size_t>(n_paths), kernels::default_exec(),
                        [&](std::size_t p) {
    const std::uint64_t stream_id = cfg.antithetic ? p / 2 : p;
    const double flip = (cfg.antithetic && (p & 1)) ? -1.0 : 1.0;
    SplitMix64 rng = SplitMix64::stream(cfg.seed, stream_id);
    double x = cfg.start_x, y = cfg.start_y;
    double g0 = G.g(x, y);
    double t_exit = -1.0;
    for (long step = 0; step < max_steps; ++step) {
      double dx, dy, z0, z1;
      flow.drift(x, y, dx, dy);
      rng.normal_pair(z0, z1);
      const double nx = x + dx * cfg.dt + sigma_step * flip * z0;
      const double ny = y + dy * cfg.dt + sigma_step * flip * z1;
      const double g1 = G.g(nx, ny);
      if (g1 >= 0.0) {
        // crossed: linear interpolation of the boundary indicator
        const double a = g0 / (g0 - g1);
        t_exit = (step + std::clamp(a, 0.0, 1.0)) * cfg.dt;
        break;
      }
      if (g0 > -band_g && g1 > -band_g) {
        // both endpoints near the boundary: half-space bridge correction
        const double d0 = -G.signed_distance(x, y);
        const double d1 = -G.signed_distance(nx, ny);
        if (d0 > 0 && d1 > 0) {
          const double pcross = std::exp(-d0 * d1 / cfg.dt);
          if (rng.uniform() < pcross) {
            t_exit = (step + d0 / (d0 + d1)) * cfg.dt;
            break;
          }
        }
      }
      x = nx;
      y = ny;
      g0 = g1;
    }
    if (t_exit < 0) {
      truncated[p] = 1;
      t_exit = max_steps * cfg.dt;
    }
    times[p] = t_exit;
  });

  McEstimate est;
  est.paths = n_paths;
  double mean = 0.0;
  for (long p = 0; p < n_paths; ++p) {
    mean += times[p];
    est.truncated += truncated[p];
  }
  mean /= n_paths;
  double var = 0.0;
  for (long p = 0; p < n_paths; ++p) {
    const double d = times[p] - mean;
    var += d * d;
  }
  var /= (n_paths - 1);
  est.mean = mean;
  est.stderr_ = std::sqrt(var / n_paths);
  est.truncation_flagged = est.truncated * 1000 >= n_paths;  // >= 0.1%
  return est;
}

CrosscheckReport field_crosscheck(const std::shared_ptr<const DomainGrid>& domain,
                                  const VectorField& u, const ScalarField& tau,
                                  const std::vector<std::pair<double, double>>& points,
                                  McConfig cfg) {
  CrosscheckReport out;
  const double allowance = 2.0 * std::sqrt(cfg.dt);
  for (const auto& [px, py] : points) {
    cfg.start_x = px;
    cfg.start_y = py;
    McEstimate est = sample_exit_time(domain, u, cfg);
    CrosscheckRow row;
    row.x = px;
    row.y = py;
    row.mc = est.mean;
    row.mc_stderr = est.stderr_;
    row.pde = interpolate(tau, px, py);
    row.allowance = allowance;
    row.pass = std::fabs(row.mc - row.pde) <= 3 * est.stderr_ + allowance &&
               !est.truncation_flagged;
    out.rows.push_back(row);
    out.report.add("mc_vs_pde(" + fmt_g(px, 4) + "," + fmt_g(py, 4) + ")",
                   std::fabs(row.mc - row.pde), 3 * est.stderr_ + allowance, 0.0,
                   row.pass, "montecarlo");
  }
  return out;
}

}  // namespace exitlab
