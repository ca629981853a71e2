#include "exitlab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace exitlab {

std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_g(double v, int prec) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_field_csv(const std::string& path, const ScalarField& f) {
  const DomainGrid& G = *f.grid;
  std::string out;
  out.reserve(G.n_active() * 24 + 128);
  out += "nx,ny,hx,hy,x0,y0\n";
  out += std::to_string(G.nx) + "," + std::to_string(G.ny) + "," + fmt_g17(G.hx) +
         "," + fmt_g17(G.hy) + "," + fmt_g17(G.x0) + "," + fmt_g17(G.y0) + "\n";
  out += "i,j,value\n";
  for (std::size_t k = 0; k < G.n_active(); ++k) {
    out += std::to_string(G.node_i(static_cast<std::int32_t>(k)));
    out += ',';
    out += std::to_string(G.node_j(static_cast<std::int32_t>(k)));
    out += ',';
    out += fmt_g17(f.v[k]);
    out += '\n';
  }
  write_text_file(path, out);
}

ScalarField read_field_csv(const std::string& path,
                           const std::shared_ptr<const DomainGrid>& grid,
                           bool zero_boundary) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty field file");
  if (!std::getline(in, line)) throw std::runtime_error(path + ": missing header row");
  {
    std::istringstream ss(line);
    int nx, ny;
    double hx, hy, x0, y0;
    char c;
    if (!(ss >> nx >> c >> ny >> c >> hx >> c >> hy >> c >> x0 >> c >> y0))
      throw std::runtime_error(path + ": malformed header row");
    if (nx != grid->nx || ny != grid->ny)
      throw std::runtime_error(path + ": field resolution does not match the grid");
    if (std::fabs(hx - grid->hx) > 1e-12 * std::fabs(grid->hx) ||
        std::fabs(hy - grid->hy) > 1e-12 * std::fabs(grid->hy))
      throw std::runtime_error(path + ": field spacing does not match the grid");
  }
  if (!std::getline(in, line)) throw std::runtime_error(path + ": missing node rows");
  ScalarField f(grid, 0.0, zero_boundary);
  std::size_t seen = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    int i, j;
    double v;
    char c;
    if (!(ss >> i >> c >> j >> c >> v))
      throw std::runtime_error(path + ": malformed node row: " + line);
    const std::int32_t k = grid->active_at(i, j);
    if (k < 0)
      throw std::runtime_error(path + ": node (" + std::to_string(i) + "," +
                               std::to_string(j) + ") is exterior on this grid");
    f.v[k] = v;
    ++seen;
  }
  if (seen != grid->n_active())
    throw std::runtime_error(path + ": file covers " + std::to_string(seen) +
                             " nodes, grid has " + std::to_string(grid->n_active()));
  return f;
}

}  // namespace exitlab
