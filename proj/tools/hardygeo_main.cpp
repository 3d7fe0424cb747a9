#include <CLI11.hpp>

#include "hardygeo/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "voxel estimators for boundary-weighted Sobolev inequalities on domains with\n"
      "a Dirichlet condition on part of the boundary (cracks included)"};
  hardygeo::RunConfig cfg;

  app.add_option("command", cfg.command,
                 "one of: list-scenarios, check-thickness, porosity, build-bullet,\n"
                 "build-star, extend, hardy, poincare, hardy-bullet, hardy-local, converge")
      ->required();
  app.add_option("--scenario", cfg.scenario, "built-in scenario name or JSON file path");
  app.add_option("--p", cfg.p, "integrability exponent (> 1 for the estimators)");
  app.add_option("--n", cfg.n, "resolution override, cells per unit length");
  app.add_option("--levels", cfg.levels, "refinement levels for converge");
  app.add_option("--l", cfg.l, "content dimension parameter");
  app.add_option("--R", cfg.R, "thickness scale cap");
  app.add_option("--gamma", cfg.gamma, "required thickness ratio");
  app.add_option("--kappa", cfg.kappa, "required porosity");
  app.add_option("--seed", cfg.seed, "seed for sampled estimators");
  app.add_option("--threads", cfg.threads, "worker cap (0 = library default)");
  app.add_option("--out", cfg.out, "output directory for report.json, tables, slices");
  app.add_flag("--quiet", cfg.quiet, "suppress the stdout summary");

  CLI11_PARSE(app, argc, argv);
  return hardygeo::run(cfg);
}
