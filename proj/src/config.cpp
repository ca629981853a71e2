#include "exitlab/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace exitlab {

namespace {
std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}
}  // namespace

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

Config Config::parse_string(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::runtime_error("config line " + std::to_string(lineno) +
                                 ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": expected key = value");
    cfg.sections_[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return cfg;
}

bool Config::has(const std::string& section, const std::string& key) const {
  auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key) > 0;
}

std::string Config::get(const std::string& section, const std::string& key,
                        const std::string& fallback) const {
  auto s = sections_.find(section);
  if (s == sections_.end()) return fallback;
  auto k = s->second.find(key);
  return k == s->second.end() ? fallback : k->second;
}

std::string Config::require(const std::string& section, const std::string& key) const {
  if (!has(section, key))
    throw std::runtime_error("config: missing [" + section + "] " + key);
  return get(section, key, "");
}

double Config::get_num(const std::string& section, const std::string& key,
                       double fallback) const {
  if (!has(section, key)) return fallback;
  return std::stod(get(section, key, ""));
}

int Config::get_int(const std::string& section, const std::string& key, int fallback) const {
  if (!has(section, key)) return fallback;
  return std::stoi(get(section, key, ""));
}

std::vector<std::string> Config::keys(const std::string& section) const {
  std::vector<std::string> out;
  auto s = sections_.find(section);
  if (s == sections_.end()) return out;
  for (const auto& [k, v] : s->second) out.push_back(k);
  return out;
}

void Config::set(const std::string& section, const std::string& key,
                 const std::string& value) {
  sections_[section][key] = value;
}

DomainSpec domain_spec_from(const Config& cfg, const std::string& d) {
  DomainSpec spec;
  const std::string shape = cfg.get(d, "shape", "disc");
  if (shape == "disc")
    spec.kind = ShapeKind::disc;
  else if (shape == "ellipse")
    spec.kind = ShapeKind::ellipse;
  else if (shape == "rectangle" || shape == "square")
    spec.kind = ShapeKind::rectangle;
  else if (shape == "implicit")
    spec.kind = ShapeKind::implicit;
  else
    throw std::runtime_error("config: unknown shape '" + shape + "'");
  spec.radius = cfg.get_num(d, "radius", 1.0);
  spec.a = cfg.get_num(d, "a", 2.0);
  spec.b = cfg.get_num(d, "b", 1.0);
  spec.width = cfg.get_num(d, "width", 1.0);
  spec.height = cfg.get_num(d, "height", 1.0);
  spec.cx = cfg.get_num(d, "cx", 0.0);
  spec.cy = cfg.get_num(d, "cy", 0.0);
  if (spec.kind == ShapeKind::implicit) spec.expr = cfg.require(d, "expr");
  spec.nx = cfg.get_int(d, "nx", 256);
  spec.ny = cfg.get_int(d, "ny", 256);
  spec.x0 = cfg.get_num(d, "x0", 0.0);
  spec.x1 = cfg.get_num(d, "x1", 0.0);
  spec.y0 = cfg.get_num(d, "y0", 0.0);
  spec.y1 = cfg.get_num(d, "y1", 0.0);
  spec.margin = cfg.get_num(d, "margin", 0.02);
  return spec;
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

}  // namespace exitlab
