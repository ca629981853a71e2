#pragma once

#include <map>
#include <string>
#include <vector>

#include "exitlab/config.hpp"
#include "exitlab/report.hpp"

namespace exitlab {

// A named, ordered list of stages sharing one config. Stage kinds mirror the
// CLI subcommands plus two orchestration kinds used by the bundled plans
// (`figure` collates contour panels, `matrix` runs a solve/verify sweep).
struct PlanStage {
  std::string name;
  std::string kind;  // solve | freidlin | iterate | verify | montecarlo | plot | figure | matrix
  std::map<std::string, std::string> opt;
};

struct ExperimentPlan {
  std::string name;
  std::string out_dir;
  Config base;  // [domain] and any shared sections
  std::vector<PlanStage> stages;
};

struct StageResult {
  std::string name;
  bool ok = false;
  bool skipped = false;
  std::string message;
};

struct PlanResult {
  std::vector<StageResult> stages;
  VerificationReport aggregate;
  bool ok = false;
};

// Executes the stages in order, writing artifacts under plan.out_dir. A failed
// stage is recorded and later stages that declare `needs = <name>` are
// skipped. Returns ok = every stage succeeded and every verification passed.
PlanResult run_plan(const ExperimentPlan& plan);

// Bundled plans: "reproduce-figure1", "theorem12-matrix". Overrides are
// applied to the [domain]-style sections (e.g. nx=128 for quick runs).
ExperimentPlan bundled_plan(const std::string& name,
                            const std::map<std::string, std::string>& overrides = {});

ExperimentPlan plan_from_config(const Config& cfg, const std::string& out_dir);

std::string output_root();  // $EXITLAB_OUTPUT_ROOT or "."

}  // namespace exitlab
