#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hardygeo/measure.hpp"
#include "hardygeo/scenario.hpp"

using namespace hardygeo;

static void check_cover_inequality(const ContentEstimate& ce) {
  // for m < l, sum r^m >= (sum r^l)^(m/l) on any cover
  for (double m : {0.4, 0.7}) {
    double lhs = ce.cover.power_sum(m);
    double rhs = std::pow(ce.cover.power_sum(ce.l), m / ce.l);
    CHECK(lhs >= rhs * (1.0 - 1e-12));
  }
}

TEST_CASE("content brackets: segment, square boundary, circle") {
  PointCloud seg = cloud_segment(vec(0, 0), vec(1, 0), 2000, 2);
  ContentEstimate su = content_upper(seg, 1.0), sl = content_lower(seg, 1.0);
  CHECK(su.upper >= 0.45);
  CHECK(su.upper <= 0.55);
  CHECK(sl.lower >= 0.45);
  CHECK(sl.lower <= su.upper + su.slack + 1e-12);
  check_cover_inequality(su);

  PointCloud sq = cloud_square_boundary(vec(0, 0), 1.0, 300);
  ContentEstimate qu = content_upper(sq, 1.0), ql = content_lower(sq, 1.0);
  CHECK(qu.upper >= 1.3);
  CHECK(qu.upper <= 1.5);
  CHECK(ql.lower >= 1.35);
  CHECK(ql.lower <= 1.45);
  CHECK(ql.lower <= qu.upper + qu.slack + 1e-12);
  check_cover_inequality(qu);

  PointCloud circ = cloud_circle(vec(0, 0), 1.0, 4000);
  ContentEstimate cu = content_upper(circ, 1.0), cl = content_lower(circ, 1.0);
  CHECK(cu.upper == doctest::Approx(2.0).epsilon(0.03));
  CHECK(cl.lower == doctest::Approx(2.0).epsilon(0.03));
  check_cover_inequality(cu);
}

TEST_CASE("thickness: circle passes, point fails, exponent monotone") {
  PointCloud circ = cloud_circle(vec(0, 0), 1.0, 4000);
  ThicknessReport tr = check_thickness(circ, 1.0, 0.5, 200, 0.5, 1);
  CHECK(tr.pass);
  CHECK(tr.gamma_min >= 0.5);
  CHECK(tr.samples.size() == 200);
  for (const ThicknessSample& ts : tr.samples) {
    CHECK(ts.r >= 4.0 * circ.sep);
    CHECK(ts.r <= 0.5);
    CHECK(ts.ratio >= tr.gamma_min);
  }

  PointCloud pt = cloud_point(vec(0.3, 0.3), 2, 1e-6);
  ThicknessReport tp = check_thickness(pt, 1.0, 0.5, 100, 0.5, 1);
  CHECK(!tp.pass);
  CHECK(tp.gamma_min < 0.5);

  // l-thick implies m-thick for m < l, with gamma^(m/l)
  ThicknessReport tm = check_thickness(circ, 0.8, 0.5, 200, 0.5, 1);
  CHECK(tm.gamma_min >= std::pow(tr.gamma_min, 0.8) * 0.99);

  CHECK_THROWS_AS(check_thickness(pt, 1.0, 3e-6, 10, 0.5, 1), Error);
  try {
    check_thickness(pt, 1.0, 3e-6, 10, 0.5, 1);
  } catch (const Error& e) {
    CHECK(e.kind == ErrorKind::ScaleTooFine);
  }
  try {
    check_thickness(circ, 0.0, 0.5, 10, 0.5, 1);
  } catch (const Error& e) {
    CHECK(e.kind == ErrorKind::BadDimension);
  }
}

TEST_CASE("l-set two-sided bounds on the circle") {
  PointCloud circ = cloud_circle(vec(0, 0), 1.0, 4000);
  LSetReport ls = check_l_set(circ, 1.0, 100, 5);
  CHECK(ls.pass);
  // arc mass inside B(x,r) is ~2r, so the ratio family hugs 2
  CHECK(ls.c0 >= 1.5);
  CHECK(ls.c1 <= 2.5);
  CHECK(ls.c0 <= ls.c1);
}

TEST_CASE("porosity: segment is porous, solid square is not") {
  std::vector<double> grid = {0.4, 0.35, 0.3, 0.25, 0.2, 0.15, 0.1, 0.05};
  PointCloud seg = cloud_segment(vec(0, 0), vec(1, 0), 2000, 2);
  PorosityReport pr = check_porosity(seg, grid, 100, 3);
  CHECK(pr.failures.empty());
  CHECK(pr.kappa_best >= 0.25);
  CHECK(pr.balls.size() == 100);

  PointCloud solid = cloud_square_area(vec(0, 0), 1.0, 60);
  PorosityReport ps = check_porosity(solid, grid, 100, 3);
  CHECK(ps.kappa_best == 0.0);
  CHECK(!ps.failures.empty());
}

TEST_CASE("dimension-weight integral: exact point anchor in 1D") {
  PointCloud F = cloud_point(vec(0), 1, 1e-9);
  for (double t : {0.5, 0.8}) {
    AikawaResult ar = aikawa_integral(vec(-1), vec(1), F, t, vec(0), 0.5);
    CHECK(ar.ratio == doctest::Approx(2.0 / t).epsilon(0.01));
    CHECK(ar.value == doctest::Approx((2.0 / t) * std::pow(0.5, t)).epsilon(0.01));
  }
  try {
    aikawa_integral(vec(-1), vec(1), F, 0.0, vec(0), 0.5);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind == ErrorKind::QuadratureUnderflow);
  }
  try {
    aikawa_integral(vec(-1), vec(1), cloud_empty(1), 0.5, vec(0), 0.5);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind == ErrorKind::Config);
  }
}

TEST_CASE("dimension sweep separates exponents by ratio spread") {
  // on a 1-dimensional set the ratio mu-integral/r^t is stable in r only
  // for t above the set dimension; a filled square pushes the crossover up
  PointCloud segF = cloud_segment(vec(0, 0.5), vec(1, 0.5), 4000, 2);
  AikawaSweep sw = aikawa_sweep(vec(0, 0), vec(1, 1), segF, {1.5}, vec(0.5, 0.5), 0.3, 4);
  REQUIRE(sw.rows.size() == 1);
  CHECK(!sw.rows[0].diverged);
  CHECK(sw.rows[0].ratio_max <= 4.0 * sw.rows[0].ratio_min);
  CHECK(sw.t_estimate == doctest::Approx(1.5));

  PointCloud fill = cloud_square_area(vec(0, 0), 1.0, 120);
  AikawaSweep sf = aikawa_sweep(vec(0, 0), vec(1, 1), fill, {0.5, 1.8}, vec(0.5, 0.5), 0.3, 3, 64);
  REQUIRE(sf.rows.size() == 2);
  CHECK(sf.rows[0].ratio_max > 4.0 * sf.rows[0].ratio_min);  // t below the dimension
  CHECK(sf.rows[1].ratio_max <= 4.0 * sf.rows[1].ratio_min);
  CHECK(sf.t_estimate == doctest::Approx(1.8));
}

TEST_CASE("relative volume density of the square") {
  ScenarioSpec s = built_in_scenario("square-edge");
  s.resolution = 16;
  VoxelDomain dom = rasterize(s);
  VolumeDensityProfile vd = relative_volume_density(dom, vec(0.5, 0.5), {0.1, 0.2});
  REQUIRE(vd.values.size() == 2);
  CHECK(vd.values[1] == doctest::Approx(3.14159).epsilon(0.12));  // full disc
  CHECK(vd.liminf == doctest::Approx(std::min(vd.values[0], vd.values[1])).epsilon(1e-15));
  VolumeDensityProfile vc = relative_volume_density(dom, vec(0, 0), {0.1, 0.2});
  CHECK(vc.values[1] == doctest::Approx(3.14159 / 4.0).epsilon(0.15));  // quarter disc
}
