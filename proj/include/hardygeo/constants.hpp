#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hardygeo/csg.hpp"
#include "hardygeo/grid.hpp"
#include "hardygeo/sobolev.hpp"

namespace hardygeo {

struct SolveOpts {
  double tol = 1e-10;         // relative eigenresidual
  int max_iter = 10000;       // outer iteration cap
  double shift = 0.0;         // pencil shift; 0 targets the extremal end
  double cg_tol = 1e-12;      // inner conjugate-gradient tolerance
  int cg_cap = 20000;
  double ascent_tol = 1e-8;   // relative quotient change over the window
  int ascent_window = 50;     // steps between convergence probes
  int ascent_cap = 20000;
  bool force_ascent = false;  // run the p-ascent even at p = 2
};

// Discrete best constant of || u/dist_D ||_p^p <= c || grad u ||_p^p, reported
// at the p-th power level.
struct HardyReport {
  double p = 2.0;
  double c = 0.0;
  GridFunction witness;
  std::string method;  // "eig-p2" | "ascent-p"
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> refinement;  // constants per grid level, when refined
};

// || u ||_p^p <= c || grad u ||_p^p; infinite when D is empty (the constant
// function is admissible with zero gradient).
struct PoincareReport {
  double p = 2.0;
  double constant = 0.0;
  bool infinite = false;
  GridFunction witness;
  std::string method;
  int iterations = 0;
  double residual = 0.0;
};

// The chained pipeline: |u/dist_D| <= |u/dist_boundary(bullet)| on the domain,
// then extension to the enclosing box and the gradient there.
struct BulletChainReport {
  bool dist_monotone = false;
  double min_slack = 0.0;  // min of dist_D - dist_bullet over cells
  double chained = 0.0;    // max chained quotient over the battery
  std::vector<double> quotients;
  HardyReport direct;
  std::string boundary_type;
  int64_t attached_cells = 0;
};

// Localization: with D inside U, V clear of D, and the domain covered by
// U and V, the global constant assembles from the Hardy constant of
// Lambda = domain ∩ U (Dirichlet part: everything except Gamma) plus
// Poincare terms.
struct LocalizedReport {
  bool d_in_u = false;
  bool v_avoids_d = false;
  bool covered = false;
  double eps = 0.0;         // min dist_D over supp(eta_V); inf when V empty
  double grad_bound = 0.0;  // sup of the discrete gradient of eta_U
  double c_lambda = 0.0;
  double c_poincare = 0.0;
  double c_total = 0.0;  // assembled bound, p-power level
  double c_direct = 0.0;
  int64_t lambda_cells = 0;
};

enum class RefineTask { Hardy, Poincare };

struct ConvergenceRow {
  double resolution = 0.0;
  double value = 0.0;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  bool increasing = false;  // strictly, across all rows
  bool decreasing = false;
  double q = 0.0;           // observed order from the last three rows
  double extrapolant = 0.0;
  bool has_extrapolant = false;
};

// p = 2: inverse power iteration on the stiffness/weighted-mass pencil with
// conjugate-gradient inner solves. p != 2: normalized quotient ascent warm-
// started from the p = 2 witness. Throws DEmpty / NoConvergence.
HardyReport hardy_constant(const VoxelDomain& dom, const BoundaryLabeling& lab, double p,
                           const SolveOpts& opts = {});

PoincareReport poincare_constant(const VoxelDomain& dom, const BoundaryLabeling& lab,
                                 double p, const SolveOpts& opts = {});

// Builds the bullet, checks dist_D >= dist to the bullet boundary cellwise,
// and runs a seeded battery of bump * dist_D^a functions (a in {0.6, 0.8, 1})
// through the glued extension with a cutoff that is 1 on the domain; the max
// chained quotient is a lower bound for the pipeline constant.
BulletChainReport hardy_via_bullet(const VoxelDomain& dom, const BoundaryLabeling& lab,
                                   const std::vector<GluePatch>& patches, double p,
                                   uint64_t seed = 0, int battery = 12,
                                   const SolveOpts& opts = {});

// Verifies the three region conditions (ConditionFailed otherwise), builds
// the two-weight partition eta_U/eta_V, and assembles
//   c_total^(1/p) = c_Lambda^(1/p) * (1 + (2d)^(1/p) * G_U * c_P^(1/p))
//                 + c_P^(1/p) / eps.
LocalizedReport localized_hardy(const VoxelDomain& dom, const BoundaryLabeling& lab,
                                const Region& u_region, const Region& v_region, double p,
                                const SolveOpts& opts = {});

// Reruns the task at doubling resolutions; Richardson-extrapolates the last
// three levels.
ConvergenceTable refine_and_compare(const ScenarioSpec& spec, int levels, RefineTask task,
                                    double p, const SolveOpts& opts = {});

}  // namespace hardygeo
