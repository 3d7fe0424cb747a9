#include "hardygeo/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "hardygeo/constants.hpp"
#include "hardygeo/measure.hpp"
#include "hardygeo/parallel.hpp"
#include "hardygeo/report.hpp"
#include "hardygeo/scenario.hpp"
#include "hardygeo/sobolev.hpp"
#include "hardygeo/topology.hpp"

namespace hardygeo {

namespace {

using nlohmann::json;

json jnum(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return round12(x);
}

std::string num_str(double x) {
  char b[48];
  std::snprintf(b, sizeof(b), "%.12g", x);
  return b;
}

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::NoConvergence:
      return 2;
    case ErrorKind::Config:
    case ErrorKind::BadDimension:
    case ErrorKind::ScaleTooFine:
    case ErrorKind::EmptyDomain:
    case ErrorKind::CrackNotInterior:
    case ErrorKind::ENotOnBoundary:
      return 3;
    default:
      return 1;  // violated hypothesis (D empty, cover gap, ...)
  }
}

ScenarioSpec load_scenario(const RunConfig& cfg) {
  ScenarioSpec s = is_built_in_scenario(cfg.scenario) ? built_in_scenario(cfg.scenario)
                                                      : parse_scenario_file(cfg.scenario);
  if (cfg.n > 0.0) s.resolution = cfg.n;
  return s;
}

void dump_field(const std::string& dir, const std::string& stem, const VoxelDomain& dom,
                const std::vector<double>& vals) {
  write_field_bin(dir + "/" + stem + ".bin", dom, vals);
  if (dom.d >= 2) {
    int64_t idx = (dom.d == 3) ? dom.dims[2] / 2 : 0;
    write_pgm_slice(dir + "/" + stem + ".pgm", dom, vals, 2, idx);
  }
}

struct CommandResult {
  json res;
  bool pass = true;
  std::string summary;
  std::vector<std::pair<std::string, std::string>> files;  // name -> content
};

json table_json(const ConvergenceTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) rows.push_back({{"n", jnum(r.resolution)}, {"value", jnum(r.value)}});
  json j;
  j["rows"] = rows;
  j["increasing"] = t.increasing;
  j["decreasing"] = t.decreasing;
  if (t.has_extrapolant) {
    j["order"] = jnum(t.q);
    j["extrapolant"] = jnum(t.extrapolant);
  }
  return j;
}

std::string table_csv(const ConvergenceTable& t) {
  std::string s = csv_line({"resolution", "value"});
  for (const auto& r : t.rows) s += csv_line({num_str(r.resolution), num_str(r.value)});
  return s;
}

CommandResult cmd_list_scenarios() {
  CommandResult out;
  json arr = json::array();
  for (const std::string& name : list_scenarios())
    arr.push_back({{"name", name}, {"description", scenario_description(name)}});
  out.res["scenarios"] = arr;
  std::string sum;
  for (const std::string& name : list_scenarios())
    sum += name + ": " + scenario_description(name) + "\n";
  out.summary = sum;
  return out;
}

CommandResult cmd_check_thickness(const RunConfig& cfg, const VoxelDomain& dom,
                                  const BoundaryLabeling& lab) {
  CommandResult out;
  PointCloud cloud = cloud_from_labeling(dom, lab);
  ThicknessReport tr = check_thickness(cloud, cfg.l, cfg.R, 200, cfg.gamma, cfg.seed);
  out.res["l"] = jnum(tr.l);
  out.res["R"] = jnum(tr.R);
  out.res["gamma_required"] = jnum(tr.gamma_req);
  out.res["gamma_min"] = jnum(tr.gamma_min);
  out.res["samples"] = tr.samples.size();
  out.res["pass"] = tr.pass;
  out.pass = tr.pass;
  std::string csv = csv_line({"x0", "x1", "x2", "r", "ratio"});
  for (const auto& s : tr.samples)
    csv += csv_line({num_str(s.x[0]), num_str(s.x[1]), num_str(s.x[2]), num_str(s.r),
                     num_str(s.ratio)});
  out.files.emplace_back("samples.csv", csv);
  out.summary = "thickness l=" + num_str(cfg.l) + " R=" + num_str(cfg.R) +
                ": gamma_min=" + num_str(tr.gamma_min) + (tr.pass ? " (pass)" : " (FAIL)");
  return out;
}

CommandResult cmd_porosity(const RunConfig& cfg, const VoxelDomain& dom,
                           const BoundaryLabeling& lab) {
  CommandResult out;
  PointCloud cloud = cloud_from_labeling(dom, lab);
  std::vector<double> grid = {0.4, 0.3, 0.2, 0.15, 0.1, 0.075, 0.05};
  PorosityReport pr = check_porosity(cloud, grid, 100, cfg.seed);
  out.pass = pr.failures.empty() && pr.kappa_best >= cfg.kappa;
  json kg = json::array();
  for (double k : pr.kappa_grid) kg.push_back(jnum(k));
  out.res["kappa_grid"] = kg;
  out.res["kappa_required"] = jnum(cfg.kappa);
  out.res["kappa_best"] = jnum(pr.kappa_best);
  out.res["balls"] = pr.balls.size();
  out.res["failures"] = pr.failures.size();
  out.res["pass"] = out.pass;
  std::string csv = csv_line({"x0", "x1", "x2", "r", "kappa"});
  for (const auto& b : pr.balls)
    csv += csv_line({num_str(b.x[0]), num_str(b.x[1]), num_str(b.x[2]), num_str(b.r),
                     num_str(b.kappa)});
  out.files.emplace_back("samples.csv", csv);
  out.summary = "porosity: kappa_best=" + num_str(pr.kappa_best) + " over " +
                std::to_string(pr.balls.size()) + " balls" + (out.pass ? " (pass)" : " (FAIL)");
  return out;
}

CommandResult cmd_build_bullet(const RunConfig& cfg, const VoxelDomain& dom,
                               const BoundaryLabeling& lab) {
  CommandResult out;
  BulletDomain bu = build_bullet(dom, lab);
  BulletCheck ck = verify_bullet(dom, lab, bu);
  int64_t enclosed = 0, attached = 0;
  json holes = json::array();
  for (const auto& h : bu.holes) {
    bool enc = h.cls == HoleClass::DirichletEnclosed;
    (enc ? enclosed : attached) += 1;
    holes.push_back({{"cells", h.cells},
                     {"shared_faces", h.shared_faces},
                     {"shared_d_faces", h.shared_d_faces},
                     {"touches_box", h.touches_box},
                     {"class", enc ? "dirichlet-enclosed" : "attached"}});
  }
  out.res["boundary_type"] = bu.boundary_type;
  out.res["holes"] = holes;
  out.res["holes_enclosed"] = enclosed;
  out.res["holes_attached"] = attached;
  out.res["attached_cells"] = bu.attached_cells;
  out.res["verify_pass"] = ck.pass;
  out.res["deterministic"] = ck.deterministic;
  out.res["discrepancies"] = ck.discrepancies.size();
  out.pass = ck.pass && ck.deterministic;
  if (!cfg.out.empty() && dom.d >= 2) {
    std::vector<double> mask(static_cast<size_t>(bu.dom.inside_count()), 1.0);
    dump_field(cfg.out, "bullet_mask", bu.dom, mask);
  }
  out.summary = "bullet boundary " + bu.boundary_type + ", holes enclosed=" +
                std::to_string(enclosed) + " attached=" + std::to_string(attached) +
                (out.pass ? " (verified)" : " (FAIL)");
  return out;
}

CommandResult cmd_build_star(const VoxelDomain& dom, const BoundaryLabeling& lab) {
  CommandResult out;
  std::vector<int64_t> e;
  for (size_t i = 0; i < lab.faces.size(); ++i)
    if (lab.dirichlet[i] && lab.faces[i].kind == 2) e.push_back(lab.faces[i].fid);
  StarDomain st = build_star(dom, e);
  out.res["e_faces"] = e.size();
  out.res["opened"] = st.opened.size();
  out.res["xi_faces"] = st.xi_faces.size();
  out.res["estar_faces"] = st.estar_faces.size();
  out.res["cells"] = st.dom.inside_count();
  out.summary = "star: opened " + std::to_string(st.opened.size()) + " of " +
                std::to_string(e.size()) + " E faces";
  return out;
}

CommandResult cmd_extend(const RunConfig& cfg, const ScenarioSpec& spec, const VoxelDomain& dom,
                         const BoundaryLabeling& lab) {
  CommandResult out;
  PartitionOfUnity pou = build_partition(dom, lab, spec.glue_patches);
  GridFunction u = sample_function(dom, [&](const Vec& x) {
    double v = 1.0;
    for (int a = 0; a < dom.d; ++a) {
      double t = (x[a] - dom.origin[a]) / (static_cast<double>(dom.dims[a]) * dom.h);
      v *= std::sin(3.14159265358979323846 * t);
    }
    return v;
  });
  u = enforce_D(u, lab, 2.0);
  GlueResult gl = glue_extension(u, pou, cfg.p);
  bool exact = true;
  for (int64_t k = 0; k < dom.inside_count() && exact; ++k) {
    int64_t l = dom.cells[static_cast<size_t>(k)];
    exact = gl.eu.at(l) == u.values[static_cast<size_t>(k)];
  }
  FaceCalculus fc_dom = face_calculus(dom);
  FaceCalculus fc_box = face_calculus(*pou.box);
  out.res["p"] = jnum(cfg.p);
  out.res["patches"] = pou.patches.size();
  out.res["ratio"] = jnum(gl.ratio);
  out.res["identity_exact"] = exact;
  out.res["w_norm_source"] = jnum(w_norm(u, cfg.p, fc_dom));
  out.res["w_norm_extension"] = jnum(w_norm(gl.eu, cfg.p, fc_box));
  out.res["box_cells"] = pou.box->inside_count();
  out.pass = exact;
  if (!cfg.out.empty()) dump_field(cfg.out, "extension", *pou.box, gl.eu.values);
  out.summary = "extension ratio " + num_str(gl.ratio) +
                (exact ? " (identity exact on the domain)" : " (identity FAILED)");
  return out;
}

CommandResult cmd_hardy(const RunConfig& cfg, const VoxelDomain& dom,
                        const BoundaryLabeling& lab) {
  CommandResult out;
  HardyReport hr = hardy_constant(dom, lab, cfg.p);
  DistanceField dist = distance_to_D(dom, lab);
  FaceCalculus fc = face_calculus(dom, lab);
  Norms nm = norms(hr.witness, cfg.p, fc, &dist);
  double q = std::pow(nm.weighted_lp, cfg.p) / std::pow(nm.grad_lp, cfg.p);
  out.res["p"] = jnum(hr.p);
  out.res["constant"] = jnum(hr.c);
  out.res["method"] = hr.method;
  out.res["iterations"] = hr.iterations;
  out.res["residual"] = jnum(hr.residual);
  out.res["witness_trace_sup"] = jnum(trace_sup(hr.witness, lab));
  out.res["witness_quotient"] = jnum(q);
  out.res["dist_max"] = jnum(dist.max_value);
  if (!cfg.out.empty()) dump_field(cfg.out, "witness", dom, hr.witness.values);
  out.summary = "hardy p=" + num_str(cfg.p) + ": discrete best constant " + num_str(hr.c) +
                " (" + hr.method + ", " + std::to_string(hr.iterations) + " its)";
  return out;
}

CommandResult cmd_poincare(const RunConfig& cfg, const VoxelDomain& dom,
                           const BoundaryLabeling& lab) {
  CommandResult out;
  PoincareReport pr = poincare_constant(dom, lab, cfg.p);
  out.res["p"] = jnum(pr.p);
  out.res["constant"] = jnum(pr.constant);
  out.res["infinite"] = pr.infinite;
  out.res["method"] = pr.method;
  out.res["iterations"] = pr.iterations;
  out.res["residual"] = jnum(pr.residual);
  if (!pr.infinite && !cfg.out.empty()) dump_field(cfg.out, "witness", dom, pr.witness.values);
  out.summary = pr.infinite
                    ? "poincare: infinite (empty Dirichlet part)"
                    : "poincare p=" + num_str(cfg.p) + ": constant " + num_str(pr.constant);
  return out;
}

CommandResult cmd_hardy_bullet(const RunConfig& cfg, const ScenarioSpec& spec,
                               const VoxelDomain& dom, const BoundaryLabeling& lab) {
  CommandResult out;
  BulletChainReport br = hardy_via_bullet(dom, lab, spec.glue_patches, cfg.p, cfg.seed, 12);
  json qs = json::array();
  for (double q : br.quotients) qs.push_back(jnum(q));
  out.res["boundary_type"] = br.boundary_type;
  out.res["attached_cells"] = br.attached_cells;
  out.res["dist_monotone"] = br.dist_monotone;
  out.res["min_slack"] = jnum(br.min_slack);
  out.res["chained"] = jnum(br.chained);
  out.res["direct"] = jnum(br.direct.c);
  out.res["quotients"] = qs;
  out.pass = br.dist_monotone;
  out.summary = "chained lower bound " + num_str(br.chained) + " vs direct " +
                num_str(br.direct.c) + (br.dist_monotone ? "" : " (dist monotonicity FAILED)");
  return out;
}

CommandResult cmd_hardy_local(const RunConfig& cfg, const ScenarioSpec& spec,
                              const VoxelDomain& dom, const BoundaryLabeling& lab) {
  CommandResult out;
  Region u_region, v_region;
  bool degenerate = !spec.loc_u.has_value();
  if (degenerate) {
    u_region.complement = true;  // no pieces: the whole space
  } else {
    u_region = *spec.loc_u;
    if (spec.loc_v) v_region = *spec.loc_v;
  }
  LocalizedReport lr = localized_hardy(dom, lab, u_region, v_region, cfg.p);
  out.res["cover"] = degenerate ? "degenerate" : "scenario";
  out.res["checks"] = {{"d_in_u", lr.d_in_u},
                       {"v_avoids_d", lr.v_avoids_d},
                       {"covered", lr.covered}};
  out.res["eps"] = jnum(lr.eps);
  out.res["grad_bound"] = jnum(lr.grad_bound);
  out.res["lambda_cells"] = lr.lambda_cells;
  out.res["c_lambda"] = jnum(lr.c_lambda);
  out.res["c_poincare"] = jnum(lr.c_poincare);
  out.res["c_total"] = jnum(lr.c_total);
  out.res["c_direct"] = jnum(lr.c_direct);
  out.res["bound_over_direct"] = jnum(lr.c_total / lr.c_direct);
  out.summary = "localized bound " + num_str(lr.c_total) + " vs direct " + num_str(lr.c_direct);
  return out;
}

CommandResult cmd_converge(const RunConfig& cfg, const ScenarioSpec& spec) {
  CommandResult out;
  ConvergenceTable th = refine_and_compare(spec, cfg.levels, RefineTask::Hardy, cfg.p);
  ConvergenceTable tp = refine_and_compare(spec, cfg.levels, RefineTask::Poincare, cfg.p);
  out.res["hardy"] = table_json(th);
  out.res["poincare"] = table_json(tp);
  out.files.emplace_back("converge_hardy.csv", table_csv(th));
  out.files.emplace_back("converge_poincare.csv", table_csv(tp));
  out.summary = "converge over " + std::to_string(cfg.levels) + " levels: hardy " +
                num_str(th.rows.back().value) +
                (th.has_extrapolant ? " -> " + num_str(th.extrapolant) : "") + ", poincare " +
                num_str(tp.rows.back().value) +
                (tp.has_extrapolant ? " -> " + num_str(tp.extrapolant) : "");
  return out;
}

}  // namespace

int run(const RunConfig& cfg) {
  set_thread_cap(cfg.threads);
  auto t0 = std::chrono::steady_clock::now();

  json rep;
  rep["schema"] = "hardygeo-report-1";
  rep["command"] = cfg.command;
  rep["config"] = {{"scenario", cfg.scenario}, {"p", jnum(cfg.p)},     {"n", jnum(cfg.n)},
                   {"levels", cfg.levels},     {"l", jnum(cfg.l)},     {"R", jnum(cfg.R)},
                   {"gamma", jnum(cfg.gamma)}, {"kappa", jnum(cfg.kappa)},
                   {"seed", cfg.seed},         {"threads", cfg.threads}};

  if (!cfg.out.empty()) std::filesystem::create_directories(cfg.out);
  auto emit = [&](int code) {
    if (!cfg.out.empty()) {
      write_text_file(cfg.out + "/report.json", rep.dump(2) + "\n");
      double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::string csv = csv_line({"command", "scenario", "seconds"});
      csv += csv_line({cfg.command, cfg.scenario, num_str(secs)});
      write_text_file(cfg.out + "/timings.csv", csv);
    }
    return code;
  };

  CommandResult cr;
  try {
    if (cfg.command == "list-scenarios") {
      cr = cmd_list_scenarios();
    } else if (cfg.command == "converge") {
      cr = cmd_converge(cfg, load_scenario(cfg));
    } else {
      ScenarioSpec spec = load_scenario(cfg);
      VoxelDomain dom = rasterize(spec);
      BoundaryLabeling lab = label_boundary(dom, spec);
      if (cfg.command == "check-thickness")
        cr = cmd_check_thickness(cfg, dom, lab);
      else if (cfg.command == "porosity")
        cr = cmd_porosity(cfg, dom, lab);
      else if (cfg.command == "build-bullet")
        cr = cmd_build_bullet(cfg, dom, lab);
      else if (cfg.command == "build-star")
        cr = cmd_build_star(dom, lab);
      else if (cfg.command == "extend")
        cr = cmd_extend(cfg, spec, dom, lab);
      else if (cfg.command == "hardy")
        cr = cmd_hardy(cfg, dom, lab);
      else if (cfg.command == "poincare")
        cr = cmd_poincare(cfg, dom, lab);
      else if (cfg.command == "hardy-bullet")
        cr = cmd_hardy_bullet(cfg, spec, dom, lab);
      else if (cfg.command == "hardy-local")
        cr = cmd_hardy_local(cfg, spec, dom, lab);
      else
        throw Error(ErrorKind::Config, "unknown command: " + cfg.command);
    }
  } catch (const Error& e) {
    rep["error"] = {{"kind", error_kind_name(e.kind)}, {"message", e.what()}};
    rep["pass"] = false;
    if (!cfg.quiet) std::printf("%s: %s\n", error_kind_name(e.kind), e.what());
    return emit(exit_code_for(e.kind));
  } catch (const std::exception& e) {
    rep["error"] = {{"kind", "internal"}, {"message", e.what()}};
    rep["pass"] = false;
    if (!cfg.quiet) std::printf("error: %s\n", e.what());
    return emit(3);
  }

  rep["result"] = cr.res;
  rep["pass"] = cr.pass;
  if (!cfg.quiet && !cr.summary.empty()) std::printf("%s\n", cr.summary.c_str());
  if (!cfg.out.empty())
    for (const auto& [name, content] : cr.files) write_text_file(cfg.out + "/" + name, content);
  return emit(cr.pass ? 0 : 1);
}

}  // namespace hardygeo
