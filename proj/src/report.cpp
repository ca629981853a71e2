#include "exitlab/report.hpp"

#include <json.hpp>

#include "exitlab/io.hpp"

namespace exitlab {

bool VerificationReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

void VerificationReport::add(const std::string& name, double measured, double bound,
                             double tol, bool pass, const std::string& provenance) {
  checks.push_back({name, measured, bound, tol, pass, provenance});
}

void VerificationReport::merge(const VerificationReport& other) {
  checks.insert(checks.end(), other.checks.begin(), other.checks.end());
}

std::string VerificationReport::to_json() const {
  nlohmann::ordered_json j;
  j["overall"] = all_pass() ? "pass" : "fail";
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json jc;
    jc["name"] = c.name;
    jc["measured"] = fmt_g17(c.measured);
    jc["bound"] = fmt_g17(c.bound);
    jc["tolerance"] = fmt_g17(c.tolerance);
    jc["pass"] = c.pass;
    jc["provenance"] = c.provenance;
    j["checks"].push_back(jc);
  }
  return j.dump(2) + "\n";
}

std::string VerificationReport::to_text() const {
  std::string out;
  for (const auto& c : checks) {
    out += c.pass ? "PASS " : "FAIL ";
    out += c.name + ": measured=" + fmt_g(c.measured, 8) + " bound=" + fmt_g(c.bound, 8) +
           " tol=" + fmt_g(c.tolerance, 4) + " [" + c.provenance + "]\n";
  }
  return out;
}

}  // namespace exitlab
