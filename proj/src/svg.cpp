#include "exitlab/svg.hpp"

#include <algorithm>
#include <cmath>

#include "exitlab/io.hpp"
#include "exitlab/levelset.hpp"

namespace exitlab {

namespace {

std::string f2(double v) { return fmt_g(v, 6); }

// fixed blue -> red ramp
std::string ramp_color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const int r = static_cast<int>(40 + 215 * t);
  const int g = static_cast<int>(60 + 80 * (1 - std::fabs(2 * t - 1)));
  const int b = static_cast<int>(255 - 215 * t);
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

struct Mapper {
  double x0, y0, x1, y1;  // world box
  double px, py, size;    // panel origin and size in svg units

  std::string map(double x, double y) const {
    const double sx = px + (x - x0) / (x1 - x0) * size;
    const double sy = py + (y1 - y) / (y1 - y0) * size;  // flip y
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.2f,%.2f", sx, sy);
    return buf;
  }
};

void append_polyline(std::string& out, const std::vector<double>& xs,
                     const std::vector<double>& ys, const Mapper& m,
                     const std::string& color, double width, bool closed) {
  if (xs.size() < 2) return;
  out += "<path d=\"M" + m.map(xs[0], ys[0]);
  for (std::size_t i = 1; i < xs.size(); ++i) out += " L" + m.map(xs[i], ys[i]);
  if (closed) out += " Z";
  out += "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" + f2(width) + "\"/>\n";
}

// boundary polylines of the domain (zero set of g on the grid)
std::vector<std::pair<std::vector<double>, std::vector<double>>> domain_outline(
    const std::shared_ptr<const DomainGrid>& grid) {
  // reuse the field contour machinery on -g sampled at the nodes
  const DomainGrid& G = *grid;
  ScalarField neg(grid, 0.0, true);
  for (std::size_t k = 0; k < G.n_active(); ++k) {
    const double x = G.xpos(G.node_i(static_cast<std::int32_t>(k)));
    const double y = G.ypos(G.node_j(static_cast<std::int32_t>(k)));
    neg.v[k] = std::max(-G.g(x, y), 0.0);
  }
  double mx = neg.max();
  std::vector<std::pair<std::vector<double>, std::vector<double>>> out;
  ContourSet cs = contour_extract(neg, 1e-4 * mx);
  for (auto& c : cs.curves) out.emplace_back(std::move(c.x), std::move(c.y));
  return out;
}

}  // namespace

std::string render_contour_svg(const std::vector<ContourPanel>& panels, int columns) {
  const double panel_sz = 360, pad = 36, legend_w = 88, title_h = 34;
  const int rows = (static_cast<int>(panels.size()) + columns - 1) / columns;
  const double cell_w = panel_sz + legend_w + pad;
  const double cell_h = panel_sz + title_h + pad;
  const double W = columns * cell_w + pad, H = rows * cell_h + pad;

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + f2(W) + "\" height=\"" +
         f2(H) + "\" viewBox=\"0 0 " + f2(W) + " " + f2(H) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (std::size_t p = 0; p < panels.size(); ++p) {
    const ContourPanel& panel = panels[p];
    const DomainGrid& G = *panel.field->grid;
    const int col = static_cast<int>(p) % columns, row = static_cast<int>(p) / columns;
    // square world window centered on the grid box
    const double gx1 = G.x0 + (G.nx - 1) * G.hx, gy1 = G.y0 + (G.ny - 1) * G.hy;
    const double wmax = std::max(gx1 - G.x0, gy1 - G.y0);
    Mapper ms;
    ms.x0 = 0.5 * (G.x0 + gx1) - 0.5 * wmax;
    ms.x1 = ms.x0 + wmax;
    ms.y0 = 0.5 * (G.y0 + gy1) - 0.5 * wmax;
    ms.y1 = ms.y0 + wmax;
    ms.px = pad + col * cell_w;
    ms.py = pad + title_h + row * cell_h;
    ms.size = panel_sz;

    out += "<text x=\"" + f2(ms.px + panel_sz / 2) + "\" y=\"" +
           f2(pad + row * cell_h + 16) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" +
           panel.title + "</text>\n";
    if (!panel.annotation.empty())
      out += "<text x=\"" + f2(ms.px + panel_sz / 2) + "\" y=\"" +
             f2(pad + row * cell_h + 31) +
             "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\" "
             "fill=\"#555\">" + panel.annotation + "</text>\n";

    for (auto& [bx, by] : domain_outline(panel.field->grid))
      append_polyline(out, bx, by, ms, "#222222", 1.6, true);

    const double mx = panel.field->max();
    for (int l = 1; l <= panel.levels; ++l) {
      const double h = mx * l / (panel.levels + 1);
      ContourSet cs = contour_extract(*panel.field, h);
      const std::string color = ramp_color(static_cast<double>(l) / panel.levels);
      for (const auto& c : cs.curves) append_polyline(out, c.x, c.y, ms, color, 1.1, true);
    }

    // legend
    const double lx = ms.px + panel_sz + 10, ly = ms.py;
    for (int l = panel.levels; l >= 1; --l) {
      const double h = mx * l / (panel.levels + 1);
      const double yy = ly + (panel.levels - l) * (panel_sz / panel.levels);
      out += "<rect x=\"" + f2(lx) + "\" y=\"" + f2(yy) + "\" width=\"12\" height=\"" +
             f2(panel_sz / panel.levels - 2) + "\" fill=\"" +
             ramp_color(static_cast<double>(l) / panel.levels) + "\"/>\n";
      out += "<text x=\"" + f2(lx + 16) + "\" y=\"" + f2(yy + 11) +
             "\" font-family=\"sans-serif\" font-size=\"10\">" + fmt_g(h, 4) + "</text>\n";
    }
  }
  out += "</svg>\n";
  return out;
}

void write_contour_svg(const std::string& path, const ScalarField& field, int levels,
                       const std::string& title, const std::string& annotation) {
  ContourPanel p;
  p.title = title;
  p.field = &field;
  p.levels = levels;
  p.annotation = annotation;
  write_text_file(path, render_contour_svg({p}, 1));
}

std::string contours_csv(const ScalarField& field, const std::vector<double>& levels) {
  std::string out = "level,curve_id,x,y\n";
  for (double h : levels) {
    ContourSet cs = contour_extract(field, h);
    int id = 0;
    for (const auto& c : cs.curves) {
      for (std::size_t v = 0; v < c.x.size(); ++v)
        out += fmt_g(h, 10) + "," + std::to_string(id) + "," + fmt_g17(c.x[v]) + "," +
               fmt_g17(c.y[v]) + "\n";
      ++id;
    }
  }
  return out;
}

}  // namespace exitlab
