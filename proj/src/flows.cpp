#include "exitlab/flows.hpp"

#include <cmath>
#include <stdexcept>

#include "exitlab/elliptic.hpp"
#include "exitlab/fd_ops.hpp"
#include "exitlab/io.hpp"

namespace exitlab {

namespace {

// smooth bump vanishing on the boundary, scaled to max ~1
double bump(const DomainSpec& s, const std::function<double(double, double)>& g,
            double x, double y) {
  switch (s.kind) {
    case ShapeKind::disc: {
      const double r2 = ((x - s.cx) * (x - s.cx) + (y - s.cy) * (y - s.cy)) /
                        (s.radius * s.radius);
      return std::max(1.0 - r2, 0.0);
    }
    case ShapeKind::ellipse: {
      const double u = (x - s.cx) / s.a, v = (y - s.cy) / s.b;
      return std::max(1.0 - u * u - v * v, 0.0);
    }
    case ShapeKind::rectangle: {
      const double xh = (x - (s.cx - 0.5 * s.width)) / s.width;
      const double yh = (y - (s.cy - 0.5 * s.height)) / s.height;
      if (xh < 0 || xh > 1 || yh < 0 || yh > 1) return 0.0;
      return 16.0 * xh * (1 - xh) * yh * (1 - yh);
    }
    case ShapeKind::implicit:
      return std::max(-g(x, y), 0.0);
  }
  return 0.0;
}

void shape_box(const DomainGrid& G, double& x0, double& x1, double& y0, double& y1) {
  const DomainSpec& s = G.spec;
  switch (s.kind) {
    case ShapeKind::disc:
      x0 = s.cx - s.radius; x1 = s.cx + s.radius;
      y0 = s.cy - s.radius; y1 = s.cy + s.radius;
      return;
    case ShapeKind::ellipse:
      x0 = s.cx - s.a; x1 = s.cx + s.a;
      y0 = s.cy - s.b; y1 = s.cy + s.b;
      return;
    case ShapeKind::rectangle:
      x0 = s.cx - 0.5 * s.width; x1 = s.cx + 0.5 * s.width;
      y0 = s.cy - 0.5 * s.height; y1 = s.cy + 0.5 * s.height;
      return;
    case ShapeKind::implicit:
      x0 = G.x0; x1 = G.x0 + (G.nx - 1) * G.hx;
      y0 = G.y0; y1 = G.y0 + (G.ny - 1) * G.hy;
      return;
  }
}

}  // namespace

Flow make_flow(const std::shared_ptr<const DomainGrid>& domain, const std::string& name) {
  Flow f;
  f.name = name;
  const DomainGrid& G = *domain;

  if (name == "zero") {
    f.u = VectorField(domain);
    return f;
  }
  if (name == "perp-tau0") {
    f.stream = solve_torsion(domain);
    f.has_stream = true;
    f.u = perp_gradient(f.stream);
    return f;
  }
  if (name.rfind("stream:", 0) == 0) {
    f.stream = read_field_csv(name.substr(7), domain, true);
    f.has_stream = true;
    f.u = perp_gradient(f.stream);
    return f;
  }

  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  shape_box(G, x0, x1, y0, y1);
  const double s_amp = 0.1;

  std::function<double(double, double)> psi;
  if (name == "cellular") {
    const bool rect = G.spec.kind == ShapeKind::rectangle;
    psi = [=, &G](double x, double y) {
      const double xh = (x - x0) / (x1 - x0), yh = (y - y0) / (y1 - y0);
      const double base = std::sin(M_PI * xh) * std::sin(M_PI * yh);
      return s_amp * base * (rect ? 1.0 : bump(G.spec, G.g, x, y));
    };
  } else if (name == "shear") {
    psi = [=, &G](double x, double y) {
      const double yc = 2.0 * (y - 0.5 * (y0 + y1)) / (y1 - y0);
      return s_amp * bump(G.spec, G.g, x, y) * yc * yc;
    };
  } else {
    throw std::invalid_argument("make_flow: unknown flow '" + name + "'");
  }

  f.stream = sample_field(domain, psi, true);
  f.has_stream = true;
  f.u = perp_gradient(f.stream);
  return f;
}

}  // namespace exitlab
