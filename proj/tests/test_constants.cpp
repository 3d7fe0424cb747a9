#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hardygeo/constants.hpp"
#include "hardygeo/scenario.hpp"
#include "oracles.hpp"

using namespace hardygeo;

static double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

TEST_CASE("frozen p=2 anchors") {
  oracles::Built b = oracles::build_named("interval", 256);
  HardyReport hr = hardy_constant(b.dom, b.lab, 2.0);
  CHECK(hr.method == "eig-p2");
  CHECK(rel(hr.c, 2.64727062225) <= 1e-9);
  CHECK(hr.residual <= 1e-10);

  oracles::Built c = oracles::build_named("interval", 64);
  CHECK(rel(hardy_constant(c.dom, c.lab, 2.0).c, 2.313071441099) <= 1e-9);

  oracles::Built d = oracles::build_named("interval", 128);
  PoincareReport pr = poincare_constant(d.dom, d.lab, 2.0);
  CHECK(!pr.infinite);
  CHECK(rel(pr.constant, 0.403708208484) <= 1e-9);
}

TEST_CASE("iterative solves match the dense pencil") {
  oracles::Built b = oracles::build_named("square-edge", 12);
  CHECK(rel(hardy_constant(b.dom, b.lab, 2.0).c, oracles::dense_hardy(b.dom, b.lab)) <= 1e-9);
  CHECK(rel(poincare_constant(b.dom, b.lab, 2.0).constant,
            oracles::dense_poincare(b.dom, b.lab)) <= 1e-9);
}

TEST_CASE("forced ascent agrees with the eigensolve at p=2") {
  oracles::Built b = oracles::build_named("interval", 64);
  HardyReport eig = hardy_constant(b.dom, b.lab, 2.0);
  SolveOpts o;
  o.force_ascent = true;
  HardyReport asc = hardy_constant(b.dom, b.lab, 2.0, o);
  CHECK(asc.method == "ascent-p");
  CHECK(rel(asc.c, eig.c) <= 1e-6);
}

TEST_CASE("witnesses are feasible and reproduce the constant") {
  oracles::Built b = oracles::build_named("square-edge", 32);
  HardyReport hr = hardy_constant(b.dom, b.lab, 2.0);
  CHECK(hr.witness.tag == Subspace::VanishingOnD);
  CHECK(trace_sup(hr.witness, b.lab) == 0.0);
  DistanceField df = distance_to_D(b.dom, b.lab);
  Norms nm = norms(hr.witness, 2.0, b.lab, &df);
  double q = std::pow(nm.weighted_lp / nm.grad_lp, 2.0);
  CHECK(rel(q, hr.c) <= 1e-8);
}

TEST_CASE("empty Dirichlet set") {
  ScenarioSpec s = built_in_scenario("interval");
  s.resolution = 32;
  s.dirichlet = pred_none();
  VoxelDomain dom = rasterize(s);
  BoundaryLabeling lab = label_boundary(dom, s);
  try {
    hardy_constant(dom, lab, 2.0);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind == ErrorKind::DEmpty);
  }
  PoincareReport pr = poincare_constant(dom, lab, 2.0);
  CHECK(pr.infinite);
}

TEST_CASE("Poincare constant is controlled by the Hardy constant") {
  oracles::Built b = oracles::build_named("square-edge", 32);
  HardyReport hr = hardy_constant(b.dom, b.lab, 2.0);
  PoincareReport pr = poincare_constant(b.dom, b.lab, 2.0);
  DistanceField df = distance_to_D(b.dom, b.lab);
  // |u| <= max dist * |u/dist| cellwise
  CHECK(pr.constant <= hr.c * std::pow(df.max_value, 2.0) * (1.0 + 1e-12));
}

TEST_CASE("bullet chain stays below the direct constant") {
  ScenarioSpec s = built_in_scenario("annulus-mixed");
  VoxelDomain dom = rasterize(s);
  BoundaryLabeling lab = label_boundary(dom, s);
  BulletChainReport br = hardy_via_bullet(dom, lab, s.glue_patches, 2.0, 1, 6);
  CHECK(br.dist_monotone);
  CHECK(br.min_slack >= -1e-12);
  CHECK(br.boundary_type == "D ∪ ∂B");
  CHECK(br.attached_cells > 0);
  CHECK(br.quotients.size() == 6);
  for (double q : br.quotients) CHECK(q <= br.chained * (1.0 + 1e-12));
  CHECK(br.chained <= br.direct.c * (1.0 + 1e-9));
  CHECK(br.chained > 0.0);
}

TEST_CASE("localization: region conditions are enforced") {
  oracles::Built b = oracles::build_named("interval", 64);
  Region::Piece mid;
  mid.lo = vec(0.4, -1);
  mid.hi = vec(0.6, 2);
  Region u_gap;
  u_gap.pieces = {mid};
  u_gap.complement = true;
  Region v_mid;
  Region::Piece vb;
  vb.lo = vec(0.45, -1);
  vb.hi = vec(0.55, 2);
  v_mid.pieces = {vb};
  try {
    localized_hardy(b.dom, b.lab, u_gap, v_mid, 2.0);  // U, V leave a gap
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind == ErrorKind::ConditionFailed);
  }

  Region u_all;
  u_all.complement = true;
  Region v_touch;
  Region::Piece vt;
  vt.lo = vec(-0.5, -1);
  vt.hi = vec(0.5, 2);
  v_touch.pieces = {vt};
  try {
    localized_hardy(b.dom, b.lab, u_all, v_touch, 2.0);  // closure(V) meets D
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind == ErrorKind::ConditionFailed);
  }
}

TEST_CASE("localization: degenerate cover collapses to the direct constant") {
  oracles::Built b = oracles::build_named("interval", 64);
  Region u_all;
  u_all.complement = true;
  Region v_none;
  LocalizedReport lr = localized_hardy(b.dom, b.lab, u_all, v_none, 2.0);
  CHECK(lr.d_in_u);
  CHECK(lr.v_avoids_d);
  CHECK(lr.covered);
  CHECK(std::isinf(lr.eps));
  CHECK(lr.grad_bound == 0.0);
  CHECK(rel(lr.c_total, lr.c_direct) <= 1e-9);
}

TEST_CASE("localization: assembled bound on a genuine two-region cover") {
  oracles::Built b = oracles::build_named("square-edge", 32);
  Region u_left;
  Region::Piece ub;
  ub.lo = vec(-0.5, -0.5);
  ub.hi = vec(0.4, 1.5);
  u_left.pieces = {ub};
  Region v_right;
  Region::Piece vb;
  vb.lo = vec(0.3, -0.5);
  vb.hi = vec(1.5, 1.5);
  v_right.pieces = {vb};
  LocalizedReport lr = localized_hardy(b.dom, b.lab, u_left, v_right, 2.0);
  CHECK(lr.d_in_u);
  CHECK(lr.v_avoids_d);
  CHECK(lr.covered);
  CHECK(lr.eps >= 0.25);
  CHECK(lr.eps <= 0.40);
  CHECK(lr.lambda_cells > 0);
  CHECK(lr.lambda_cells < b.dom.inside_count());
  CHECK(std::isfinite(lr.c_total));
  CHECK(lr.c_total >= lr.c_lambda);
  CHECK(lr.c_total >= lr.c_direct);  // the assembled bound is lossy but finite
}

TEST_CASE("refinement tables") {
  ScenarioSpec s = built_in_scenario("interval");
  s.resolution = 64;
  ConvergenceTable th = refine_and_compare(s, 3, RefineTask::Hardy, 2.0);
  REQUIRE(th.rows.size() == 3);
  CHECK(th.rows[0].resolution == doctest::Approx(64));
  CHECK(th.rows[2].resolution == doctest::Approx(256));
  CHECK(th.increasing);
  CHECK(th.has_extrapolant);
  CHECK(th.extrapolant > th.rows[2].value);
  CHECK(th.extrapolant < 4.5);

  ConvergenceTable tp = refine_and_compare(s, 3, RefineTask::Poincare, 2.0);
  CHECK(tp.has_extrapolant);
  CHECK(rel(tp.extrapolant, 4.0 / (M_PI * M_PI)) <= 0.01);
}

TEST_CASE("solver failure surfaces as NoConvergence") {
  oracles::Built b = oracles::build_named("interval", 128);
  SolveOpts tight;
  tight.max_iter = 2;
  try {
    hardy_constant(b.dom, b.lab, 2.0, tight);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind == ErrorKind::NoConvergence);
  }
  SolveOpts capped;
  capped.ascent_cap = 3;
  try {
    hardy_constant(b.dom, b.lab, 3.0, capped);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind == ErrorKind::NoConvergence);
  }
}

TEST_CASE("exponent validation") {
  oracles::Built b = oracles::build_named("interval", 32);
  for (double p : {1.0, 0.5, -2.0}) {
    try {
      hardy_constant(b.dom, b.lab, p);
      CHECK(false);
    } catch (const Error& e) {
      CHECK(e.kind == ErrorKind::Config);
    }
  }
}
