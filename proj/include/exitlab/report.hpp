#pragma once

#include <string>
#include <vector>

namespace exitlab {

// One measured inequality/identity with provenance; aggregated into the
// artifact-level verification reports.
struct Check {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  double tolerance = 0.0;   // slack applied on top of the bound
  bool pass = false;
  std::string provenance;   // module that produced the number
};

struct VerificationReport {
  std::vector<Check> checks;

  bool all_pass() const;
  void add(const std::string& name, double measured, double bound, double tol,
           bool pass, const std::string& provenance);
  void merge(const VerificationReport& other);
  std::string to_json() const;   // deterministic key order
  std::string to_text() const;   // one line per check
};

}  // namespace exitlab
