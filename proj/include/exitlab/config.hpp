#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "exitlab/grid.hpp"

namespace exitlab {

// key = value config with [section] headers and # comments. All subcommands
// share one file; each reads its own section plus [domain].
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text);

  bool has(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key,
                  const std::string& fallback) const;
  std::string require(const std::string& section, const std::string& key) const;
  double get_num(const std::string& section, const std::string& key, double fallback) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;
  std::vector<std::string> keys(const std::string& section) const;

  void set(const std::string& section, const std::string& key, const std::string& value);

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

DomainSpec domain_spec_from(const Config& cfg, const std::string& section = "domain");

std::vector<double> parse_number_list(const std::string& text);  // "1,10,1e2"

}  // namespace exitlab
