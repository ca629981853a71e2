#include "exitlab/plan.hpp"

#include <json.hpp>

#include <array>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <sstream>
#include <stdexcept>

#include "exitlab/critpoint.hpp"
#include "exitlab/elliptic.hpp"
#include "exitlab/fd_ops.hpp"
#include "exitlab/flows.hpp"
#include "exitlab/freidlin.hpp"
#include "exitlab/io.hpp"
#include "exitlab/levelset.hpp"
#include "exitlab/montecarlo.hpp"
#include "exitlab/rearrange.hpp"
#include "exitlab/svg.hpp"

namespace exitlab {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

struct Ctx {
  const ExperimentPlan* plan = nullptr;
  std::string dir;
  std::map<std::string, std::shared_ptr<const DomainGrid>> grids;
  std::map<std::string, ScalarField> torsions;
  VerificationReport aggregate;

  std::shared_ptr<const DomainGrid> grid(const std::string& section) {
    auto it = grids.find(section);
    if (it != grids.end()) return it->second;
    auto g = build_domain(domain_spec_from(plan->base, section));
    grids[section] = g;
    return g;
  }

  const ScalarField& torsion(const std::string& section) {
    auto it = torsions.find(section);
    if (it != torsions.end()) return it->second;
    torsions[section] = solve_torsion(grid(section));
    return torsions[section];
  }

  std::string path(const std::string& file) const { return (fs::path(dir) / file).string(); }
};

std::string opt_of(const PlanStage& st, const std::string& key, const std::string& dflt) {
  auto it = st.opt.find(key);
  return it == st.opt.end() ? dflt : it->second;
}

double opt_num(const PlanStage& st, const std::string& key, double dflt) {
  auto it = st.opt.find(key);
  return it == st.opt.end() ? dflt : std::stod(it->second);
}

std::vector<double> parse_p_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "inf" || item == "Inf" || item == "INF")
      out.push_back(INFINITY);
    else if (!item.empty())
      out.push_back(std::stod(item));
  }
  return out;
}

AdvectionScheme scheme_of(const std::string& s) {
  if (s == "centered") return AdvectionScheme::centered;
  if (s == "upwind") return AdvectionScheme::upwind;
  if (s == "auto") return AdvectionScheme::automatic;
  throw std::runtime_error("unknown advection scheme '" + s + "'");
}

ordered_json run_record(const ExitTimeSolution& sol) {
  ordered_json j;
  j["residual"] = sol.residual;
  j["iterations"] = sol.iterations;
  j["peclet"] = sol.peclet_max;
  j["scheme"] = sol.scheme_used;
  j["upwind"] = sol.upwind_engaged;
  j["flow_warning"] = sol.flow_warning;
  j["divergence_defect"] = sol.divergence_defect;
  j["tangency_defect"] = sol.tangency_defect;
  j["norm_l1"] = lp_norm(sol.tau, 1);
  j["norm_l2"] = lp_norm(sol.tau, 2);
  j["norm_linf"] = lp_norm(sol.tau, INFINITY);
  return j;
}

ExitTimeSolution solve_with_flow(Ctx& ctx, const std::string& domain_sec,
                                 const std::string& flow_name, double A,
                                 const std::string& scheme) {
  auto g = ctx.grid(domain_sec);
  Flow flow = make_flow(g, flow_name);
  SolveOptions opts;
  opts.amplitude = A;
  opts.scheme = scheme_of(scheme);
  opts.warn_and_proceed = true;
  return solve_exit_time(g, flow.u, opts);
}

void exec_solve(Ctx& ctx, const PlanStage& st) {
  const std::string dom = opt_of(st, "domain", "domain");
  const std::string flow = opt_of(st, "flow", "zero");
  const double A = opt_num(st, "amplitude", 0.0);
  ExitTimeSolution sol = solve_with_flow(ctx, dom, flow, A, opt_of(st, "scheme", "auto"));
  write_field_csv(ctx.path(opt_of(st, "out", st.name + "-field.csv")), sol.tau);
  ordered_json j = run_record(sol);
  j["flow"] = flow;
  j["amplitude"] = A;
  write_text_file(ctx.path(opt_of(st, "record", st.name + "-record.json")), j.dump(2) + "\n");
}

void exec_freidlin(Ctx& ctx, const PlanStage& st) {
  const std::string dom = opt_of(st, "domain", "domain");
  auto g = ctx.grid(dom);
  const std::string stream = opt_of(st, "stream", "tau0");
  ScalarField psi = stream == "tau0" ? ctx.torsion(dom) : read_field_csv(ctx.path(stream), g, true);
  const int K = static_cast<int>(opt_num(st, "levels", 200));
  FreidlinResult R = freidlin_limit(psi, K);

  std::string csv = "h,a,T,p,tau_bar\n";
  for (std::size_t k = 0; k < R.areas.levels.size(); ++k)
    csv += fmt_g17(R.areas.levels[k]) + "," + fmt_g17(R.areas.area[k]) + "," +
           fmt_g17(R.areas.deriv[k]) + "," + fmt_g17(R.areas.flux[k]) + "," +
           fmt_g17(R.profile.tau_bar[k]) + "\n";
  const std::string prefix = opt_of(st, "out", st.name + "-");
  write_text_file(ctx.path(prefix + "profile.csv"), csv);
  write_field_csv(ctx.path(prefix + "field.csv"), R.tau_bar);

  if (st.opt.count("amplitudes")) {
    auto rows = convergence_study(psi, parse_number_list(st.opt.at("amplitudes")));
    std::string tbl = "amplitude,deviation,scheme,flagged\n";
    for (const auto& r : rows)
      tbl += fmt_g(r.amplitude, 10) + "," + fmt_g17(r.deviation) + "," + r.scheme + "," +
             (r.flagged ? "1" : "0") + "\n";
    write_text_file(ctx.path(prefix + "convergence.csv"), tbl);
  }
}

void exec_iterate(Ctx& ctx, const PlanStage& st) {
  const std::string dom = opt_of(st, "domain", "domain");
  auto g = ctx.grid(dom);
  const std::string scheme = opt_of(st, "scheme", "freidlin");
  const int max_steps = static_cast<int>(opt_num(st, "max-steps", 200));
  const double A = opt_num(st, "amplitude", 0.0);

  IterationTrace trace;
  if (scheme == "naive")
    trace = iterate_naive(g, max_steps);
  else if (scheme == "freidlin")
    trace = iterate_stabilized(g, max_steps, Reparam::freidlin);
  else if (scheme == "advective")
    trace = iterate_stabilized(g, max_steps, Reparam::advective, A);
  else
    throw std::runtime_error("iterate: unknown scheme '" + scheme + "'");

  std::string csv = "step,sup_norm,residual_l2,apriori1,apriori2,apriori3\n";
  for (const auto& r : trace.records)
    csv += std::to_string(r.step) + "," + fmt_g17(r.sup_norm) + "," + fmt_g17(r.residual_l2) +
           "," + fmt_g17(r.apriori_sup_bound) + "," + fmt_g17(r.apriori_mass) + "," +
           fmt_g17(r.apriori_distance) + "\n";
  const std::string prefix = opt_of(st, "out", st.name + "-");
  write_text_file(ctx.path(prefix + "trace.csv"), csv);
  write_field_csv(ctx.path(prefix + "field.csv"), trace.final_field);

  const char* verdict = trace.verdict == IterationVerdict::converged  ? "converged"
                        : trace.verdict == IterationVerdict::diverged ? "diverged"
                                                                      : "max-iterations";
  ordered_json j;
  j["scheme"] = trace.scheme;
  j["verdict"] = verdict;
  j["steps"] = trace.records.back().step;
  j["sup_norm"] = trace.records.back().sup_norm;
  write_text_file(ctx.path(prefix + "verdict.json"), j.dump(2) + "\n");

  const ScalarField& tau0 = ctx.torsion(dom);
  std::string ann_phi, ann_tau;
  try {
    ann_phi = "axis ratio at max: " + fmt_g(hessian_at_max(trace.final_field).axis_ratio, 3);
    ann_tau = "axis ratio at max: " + fmt_g(hessian_at_max(tau0).axis_ratio, 3);
  } catch (const std::exception&) {
  }
  ContourPanel p1{"Maximiser psi", &trace.final_field, 10, ann_phi};
  ContourPanel p2{"Expected exit time tau0", &tau0, 10, ann_tau};
  write_text_file(ctx.path(prefix + "contours.svg"), render_contour_svg({p1, p2}, 2));
  if (trace.verdict == IterationVerdict::diverged)
    throw std::runtime_error("iteration diverged (recorded in " + prefix + "trace.csv)");
}

void exec_verify(Ctx& ctx, const PlanStage& st) {
  const std::string dom = opt_of(st, "domain", "domain");
  auto g = ctx.grid(dom);
  const std::string field_file = opt_of(st, "field", "");
  ScalarField tau = field_file.empty() || field_file == "tau0"
                        ? ctx.torsion(dom)
                        : read_field_csv(ctx.path(field_file), g, true);
  VerificationReport rep = verify_lp_comparison(tau, parse_p_list(opt_of(st, "p", "1,2,inf")));
  if (opt_of(st, "apriori", "0") == "1") rep.merge(apriori_checks(tau, ctx.torsion(dom)));

  RadialProfile rad = symmetric_rearrangement(tau);
  std::string csv = "r,gamma,bound\n";
  for (std::size_t k = 0; k < rad.r.size(); ++k)
    csv += fmt_g17(rad.r[k]) + "," + fmt_g17(rad.gamma[k]) + "," +
           fmt_g17((rad.rho * rad.rho - rad.r[k] * rad.r[k]) / 4.0) + "\n";

  const std::string prefix = opt_of(st, "out", st.name + "-");
  write_text_file(ctx.path(prefix + "report.json"), rep.to_json());
  write_text_file(ctx.path(prefix + "radial.csv"), csv);
  ctx.aggregate.merge(rep);
  if (!rep.all_pass()) throw std::runtime_error("verification checks failed");
}

void exec_montecarlo(Ctx& ctx, const PlanStage& st) {
  const std::string dom = opt_of(st, "domain", "domain");
  auto g = ctx.grid(dom);
  const std::string flow_name = opt_of(st, "flow", "zero");
  Flow flow = make_flow(g, flow_name);
  McConfig cfg;
  cfg.amplitude = opt_num(st, "amplitude", 0.0);
  cfg.dt = opt_num(st, "dt", 1e-4);
  cfg.paths = static_cast<long>(opt_num(st, "paths", 100000));
  cfg.seed = static_cast<std::uint64_t>(opt_num(st, "seed", 1));
  auto start = parse_number_list(opt_of(st, "start", "0,0"));
  cfg.start_x = start.at(0);
  cfg.start_y = start.at(1);
  McEstimate est = sample_exit_time(g, flow.u, cfg);

  const std::string prefix = opt_of(st, "out", st.name + "-");
  write_text_file(ctx.path(prefix + "estimate.csv"),
                  "mean,stderr,paths,truncated\n" + fmt_g17(est.mean) + "," +
                      fmt_g17(est.stderr_) + "," + std::to_string(est.paths) + "," +
                      std::to_string(est.truncated) + "\n");
  ordered_json j;
  j["mean"] = est.mean;
  j["stderr"] = est.stderr_;
  j["paths"] = est.paths;
  j["truncated"] = est.truncated;
  j["truncation_flagged"] = est.truncation_flagged;
  j["flow"] = flow_name;
  j["amplitude"] = cfg.amplitude;
  j["dt"] = cfg.dt;
  j["seed"] = cfg.seed;
  write_text_file(ctx.path(prefix + "estimate.json"), j.dump(2) + "\n");
}

void exec_plot(Ctx& ctx, const PlanStage& st) {
  const std::string dom = opt_of(st, "domain", "domain");
  auto g = ctx.grid(dom);
  ScalarField f = read_field_csv(ctx.path(st.opt.at("field")), g, true);
  const int levels = static_cast<int>(opt_num(st, "levels", 10));
  write_contour_svg(ctx.path(opt_of(st, "out", st.name + ".svg")), f, levels,
                    opt_of(st, "title", st.opt.at("field")));
  std::vector<double> hs;
  const double mx = f.max();
  for (int l = 1; l <= levels; ++l) hs.push_back(mx * l / (levels + 1));
  write_text_file(ctx.path(opt_of(st, "out", st.name + ".svg") + ".csv"),
                  contours_csv(f, hs));
}

void exec_figure(Ctx& ctx, const PlanStage& st) {
  // panels: semicolon-separated "domain_section|field_file_or_tau0|title"
  std::vector<ScalarField> fields;
  std::vector<ContourPanel> panels;
  std::istringstream ss(st.opt.at("panels"));
  std::string item;
  std::vector<std::array<std::string, 3>> specs;
  while (std::getline(ss, item, ';')) {
    std::istringstream ps(item);
    std::array<std::string, 3> spec;
    std::getline(ps, spec[0], '|');
    std::getline(ps, spec[1], '|');
    std::getline(ps, spec[2], '|');
    specs.push_back(spec);
  }
  fields.reserve(specs.size());
  for (const auto& sp : specs) {
    auto g = ctx.grid(sp[0]);
    fields.push_back(sp[1] == "tau0" ? ctx.torsion(sp[0]) : read_field_csv(ctx.path(sp[1]), g, true));
  }
  for (std::size_t i = 0; i < specs.size(); ++i) {
    std::string ann;
    try {
      ann = "axis ratio at max: " + fmt_g(hessian_at_max(fields[i]).axis_ratio, 3);
    } catch (const std::exception&) {
    }
    panels.push_back({specs[i][2], &fields[i], 10, ann});
  }
  write_text_file(ctx.path(opt_of(st, "out", st.name + ".svg")),
                  render_contour_svg(panels, static_cast<int>(opt_num(st, "columns", 2))));
}

void exec_matrix(Ctx& ctx, const PlanStage& st) {
  std::istringstream ds(opt_of(st, "domains", "domain"));
  std::vector<std::string> domains;
  std::string item;
  while (std::getline(ds, item, ',')) domains.push_back(item);
  std::istringstream fsS(opt_of(st, "flows", "zero"));
  std::vector<std::string> flows;
  while (std::getline(fsS, item, ',')) flows.push_back(item);
  auto amplitudes = parse_number_list(opt_of(st, "amplitudes", "0"));
  auto ps = parse_p_list(opt_of(st, "p", "1,2,inf"));

  VerificationReport rep;
  std::string csv = "domain,flow,amplitude,p,norm,bound,pass\n";
  for (const auto& dom : domains) {
    for (const auto& flow : flows) {
      for (double A : amplitudes) {
        if (A == 0.0 && flow != flows.front()) continue;  // A=0 is flow independent
        ExitTimeSolution sol = solve_with_flow(ctx, dom, flow, A, "auto");
        VerificationReport r = verify_lp_comparison(sol.tau, ps);
        for (std::size_t c = 0; c < r.checks.size(); ++c) {
          Check& ck = r.checks[c];
          ck.name = dom + "/" + flow + "/A=" + fmt_g(A, 6) + "/" + ck.name;
          csv += dom + "," + flow + "," + fmt_g(A, 10) + "," +
                 fmt_g(std::isinf(ps[c]) ? -1 : ps[c], 6) + "," + fmt_g17(ck.measured) + "," +
                 fmt_g17(ck.bound) + "," + (ck.pass ? "1" : "0") + "\n";
        }
        rep.merge(r);
      }
    }
  }
  const std::string prefix = opt_of(st, "out", st.name + "-");
  write_text_file(ctx.path(prefix + "matrix.csv"), csv);
  write_text_file(ctx.path(prefix + "report.json"), rep.to_json());
  ctx.aggregate.merge(rep);
  if (!rep.all_pass()) throw std::runtime_error("matrix verification failed");
}

}  // namespace

std::string output_root() {
  if (const char* env = std::getenv("EXITLAB_OUTPUT_ROOT"); env && env[0]) return env;
  return ".";
}

PlanResult run_plan(const ExperimentPlan& plan) {
  // stage names must be unique
  for (std::size_t a = 0; a < plan.stages.size(); ++a)
    for (std::size_t b = a + 1; b < plan.stages.size(); ++b)
      if (plan.stages[a].name == plan.stages[b].name)
        throw std::invalid_argument("run_plan: duplicate stage name '" + plan.stages[a].name + "'");

  Ctx ctx;
  ctx.plan = &plan;
  ctx.dir = plan.out_dir;
  std::filesystem::create_directories(ctx.dir);

  PlanResult result;
  std::map<std::string, bool> ok_by_name;
  for (const auto& st : plan.stages) {
    StageResult sr;
    sr.name = st.name;
    // skip when a declared dependency failed
    bool blocked = false;
    if (auto it = st.opt.find("needs"); it != st.opt.end()) {
      std::istringstream ss(it->second);
      std::string dep;
      while (std::getline(ss, dep, ','))
        if (ok_by_name.count(dep) && !ok_by_name[dep]) blocked = true;
    }
    if (blocked) {
      sr.skipped = true;
      sr.message = "skipped: dependency failed";
      ok_by_name[st.name] = false;
      result.stages.push_back(sr);
      continue;
    }
    try {
      if (st.kind == "solve")
        exec_solve(ctx, st);
      else if (st.kind == "freidlin")
        exec_freidlin(ctx, st);
      else if (st.kind == "iterate")
        exec_iterate(ctx, st);
      else if (st.kind == "verify")
        exec_verify(ctx, st);
      else if (st.kind == "montecarlo")
        exec_montecarlo(ctx, st);
      else if (st.kind == "plot")
        exec_plot(ctx, st);
      else if (st.kind == "figure")
        exec_figure(ctx, st);
      else if (st.kind == "matrix")
        exec_matrix(ctx, st);
      else
        throw std::runtime_error("unknown stage kind '" + st.kind + "'");
      sr.ok = true;
    } catch (const std::exception& ex) {
      sr.ok = false;
      sr.message = ex.what();
    }
    ok_by_name[st.name] = sr.ok;
    result.stages.push_back(sr);
  }

  result.aggregate = ctx.aggregate;
  result.ok = result.aggregate.all_pass();
  for (const auto& sr : result.stages) result.ok = result.ok && sr.ok;

  ordered_json j;
  j["plan"] = plan.name;
  j["ok"] = result.ok;
  j["stages"] = ordered_json::array();
  for (const auto& sr : result.stages) {
    ordered_json js;
    js["name"] = sr.name;
    js["ok"] = sr.ok;
    js["skipped"] = sr.skipped;
    js["message"] = sr.message;
    j["stages"].push_back(js);
  }
  write_text_file(ctx.path("plan-result.json"), j.dump(2) + "\n");
  if (!result.aggregate.checks.empty())
    write_text_file(ctx.path("aggregate-report.json"), result.aggregate.to_json());
  return result;
}

ExperimentPlan bundled_plan(const std::string& name,
                            const std::map<std::string, std::string>& overrides) {
  ExperimentPlan plan;
  plan.name = name;
  plan.out_dir = (std::filesystem::path(output_root()) / name).string();

  if (name == "reproduce-figure1") {
    plan.base = Config::parse_string(
        "[domain:ellipse]\n"
        "shape = ellipse\na = 2\nb = 1\nnx = 256\nny = 256\n"
        "[domain:blob]\n"
        "shape = implicit\nexpr = (x/1.3)^4 + y^4 - 1\n"
        "x0 = -1.5\nx1 = 1.5\ny0 = -1.2\ny1 = 1.2\nnx = 256\nny = 256\n");
    PlanStage it1{"iterate-ellipse", "iterate",
                  {{"domain", "domain:ellipse"}, {"scheme", "freidlin"},
                   {"max-steps", "200"}, {"out", "ellipse-"}}};
    PlanStage it2{"iterate-blob", "iterate",
                  {{"domain", "domain:blob"}, {"scheme", "freidlin"},
                   {"max-steps", "200"}, {"out", "blob-"}}};
    PlanStage fig{"figure1", "figure",
                  {{"panels",
                    "domain:ellipse|ellipse-field.csv|Maximiser psi;"
                    "domain:ellipse|tau0|Expected exit time tau0;"
                    "domain:blob|blob-field.csv|Maximiser psi;"
                    "domain:blob|tau0|Expected exit time tau0"},
                   {"columns", "2"},
                   {"needs", "iterate-ellipse,iterate-blob"},
                   {"out", "figure1.svg"}}};
    plan.stages = {it1, it2, fig};
  } else if (name == "theorem12-matrix") {
    plan.base = Config::parse_string(
        "[domain:disc]\nshape = disc\nradius = 1\nnx = 256\nny = 256\n"
        "[domain:ellipse]\nshape = ellipse\na = 2\nb = 1\nnx = 256\nny = 256\n"
        "[domain:square]\nshape = rectangle\nwidth = 1\nheight = 1\n"
        "cx = 0.5\ncy = 0.5\nnx = 256\nny = 256\n");
    PlanStage mat{"theorem12", "matrix",
                  {{"domains", "domain:disc,domain:ellipse,domain:square"},
                   {"flows", "zero,cellular,shear,perp-tau0"},
                   {"amplitudes", "0,1,10,100"},
                   {"p", "1,2,inf"},
                   {"out", "theorem12-"}}};
    plan.stages = {mat};
  } else {
    throw std::invalid_argument("unknown bundled plan '" + name + "'");
  }

  // overrides: "domain.key=value" hits every domain section, "<kind>.key"
  // hits every stage of that kind, "out=..." moves the output directory
  for (const auto& [key, value] : overrides) {
    if (key == "out") {
      plan.out_dir = value;
      continue;
    }
    auto dot = key.find('.');
    if (dot == std::string::npos) continue;
    const std::string head = key.substr(0, dot), tail = key.substr(dot + 1);
    if (head == "domain") {
      for (const char* sec : {"domain", "domain:ellipse", "domain:blob", "domain:disc",
                              "domain:square"})
        if (!plan.base.keys(sec).empty()) plan.base.set(sec, tail, value);
    } else {
      for (auto& st : plan.stages)
        if (st.kind == head) st.opt[tail] = value;
    }
  }
  return plan;
}

ExperimentPlan plan_from_config(const Config& cfg, const std::string& out_dir) {
  ExperimentPlan plan;
  plan.name = cfg.get("plan", "name", "plan");
  plan.out_dir = out_dir.empty()
                     ? (std::filesystem::path(output_root()) / plan.name).string()
                     : out_dir;
  plan.base = cfg;
  // [plan] stages = name1:kind1, name2:kind2, ...; per-stage options live in
  // sections [stage:<name>]
  std::istringstream ss(cfg.require("plan", "stages"));
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto colon = item.find(':');
    if (colon == std::string::npos)
      throw std::runtime_error("plan: stage entries must be name:kind");
    PlanStage st;
    st.name = item.substr(0, colon);
    st.kind = item.substr(colon + 1);
    // trim
    while (!st.name.empty() && st.name.front() == ' ') st.name.erase(0, 1);
    while (!st.name.empty() && st.name.back() == ' ') st.name.pop_back();
    while (!st.kind.empty() && st.kind.front() == ' ') st.kind.erase(0, 1);
    while (!st.kind.empty() && st.kind.back() == ' ') st.kind.pop_back();
    for (const auto& key : cfg.keys("stage:" + st.name))
      st.opt[key] = cfg.get("stage:" + st.name, key, "");
    plan.stages.push_back(st);
  }
  return plan;
}

}  // namespace exitlab
