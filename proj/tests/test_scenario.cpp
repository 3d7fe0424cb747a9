#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hardygeo/scenario.hpp"
#include "oracles.hpp"

using namespace hardygeo;

TEST_CASE("interval rasterization structure") {
  ScenarioSpec s = built_in_scenario("interval");
  s.resolution = 8;
  VoxelDomain dom = rasterize(s);
  CHECK(dom.d == 1);
  CHECK(dom.h == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(dom.dims[0] == 8 + 2 * s.padding);
  CHECK(dom.dims[1] == 1);
  CHECK(dom.inside_count() == 8);
  // first inside cell sits at the left end of [0,1]
  CHECK(dom.center(dom.cells[0])[0] == doctest::Approx(0.0625).epsilon(1e-14));
  CHECK(dom.warning.empty());

  BoundaryLabeling lab = label_boundary(dom, s);
  CHECK(lab.faces.size() == 2);
  CHECK(lab.d_count() == 1);
  CHECK(lab.d_points.size() == 1);
  CHECK(lab.d_points[0][0] == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("square rasterization and labeling counts") {
  ScenarioSpec s = built_in_scenario("square-edge");
  s.resolution = 8;
  VoxelDomain dom = rasterize(s);
  BoundaryLabeling lab = label_boundary(dom, s);
  CHECK(dom.inside_count() == 64);
  CHECK(lab.faces.size() == 32);
  // 8 left-edge faces plus the two corner transverse faces caught by the h/2
  // predicate tolerance
  CHECK(lab.d_count() == 10);
  for (size_t i = 0; i < lab.faces.size(); ++i) {
    int64_t lo, hi;
    dom.face_cells(lab.faces[i].fid, lo, hi);
    bool li = lo >= 0 && dom.is_inside(lo), ui = hi >= 0 && dom.is_inside(hi);
    CHECK(li != ui);  // kind 0/1 faces have exactly one inside neighbor
  }
}

TEST_CASE("slit crack becomes blocked Dirichlet faces") {
  ScenarioSpec s = built_in_scenario("slit-square");
  s.resolution = 16;
  VoxelDomain dom = rasterize(s);
  BoundaryLabeling lab = label_boundary(dom, s);
  int64_t nblocked = 0;
  for (int64_t l = 0; l < dom.ncells(); ++l)
    for (int a = 0; a < dom.d; ++a)
      if (dom.is_blocked(l, a)) ++nblocked;
  CHECK(nblocked == 8);
  int64_t crack = 0;
  for (size_t i = 0; i < lab.faces.size(); ++i)
    if (lab.faces[i].kind == 2) {
      ++crack;
      CHECK(lab.dirichlet[i] == 1);  // the slit carries the Dirichlet condition
      int64_t lo, hi;
      dom.face_cells(lab.faces[i].fid, lo, hi);
      CHECK(dom.is_inside(lo));
      CHECK(dom.is_inside(hi));
    }
  CHECK(crack == nblocked);
  CHECK(lab.d_count() == crack);
}

TEST_CASE("disconnected solid is pruned to the largest component") {
  ScenarioSpec s;
  s.name = "two";
  s.d = 2;
  s.resolution = 10;
  s.solid = csg_union({csg_box(vec(0, 0), vec(0.3, 0.3)), csg_box(vec(0.6, 0.6), vec(1, 1))});
  s.dirichlet = pred_outer_face();
  VoxelDomain dom = rasterize(s);
  CHECK(dom.inside_count() == 16);  // the 4x4 box wins over the 3x3 one
  CHECK(!dom.warning.empty());
}

TEST_CASE("rasterization error kinds") {
  ScenarioSpec s;
  s.d = 4;
  s.solid = csg_box(vec(0, 0), vec(1, 1));
  CHECK_THROWS_WITH_AS(rasterize(s), doctest::Contains("dimension"), Error);
  try {
    rasterize(s);
  } catch (const Error& e) {
    CHECK(e.kind == ErrorKind::BadDimension);
  }

  ScenarioSpec e;
  e.d = 2;
  e.resolution = 4;
  e.solid = csg_ball(vec(0.25, 0.25), 0.01);  // a cell corner: no center inside
  try {
    rasterize(e);
    CHECK(false);
  } catch (const Error& err) {
    CHECK(err.kind == ErrorKind::EmptyDomain);
  }

  ScenarioSpec c;
  c.d = 2;
  c.resolution = 16;
  c.solid = csg_box(vec(0, 0), vec(1, 1));
  c.dirichlet = pred_on_crack();
  CrackPatch cp;
  cp.axis = 1;
  cp.plane = 0.0;  // snapped face lies between outside cells
  cp.seg_lo = 0.25;
  cp.seg_hi = 0.75;
  c.cracks = {cp};
  try {
    rasterize(c);
    CHECK(false);
  } catch (const Error& err) {
    CHECK(err.kind == ErrorKind::CrackNotInterior);
  }
  c.cracks[0].plane = 0.5;
  c.cracks[0].seg_lo = 2.0;  // misses the grid
  c.cracks[0].seg_hi = 3.0;
  try {
    rasterize(c);
    CHECK(false);
  } catch (const Error& err) {
    CHECK(err.kind == ErrorKind::CrackNotInterior);
  }
}

TEST_CASE("scenario text round-trip is a fixpoint") {
  for (const std::string& nm : list_scenarios()) {
    ScenarioSpec s = built_in_scenario(nm);
    std::string t1 = scenario_to_text(s);
    ScenarioSpec s2 = parse_scenario_text(t1);
    CHECK(scenario_to_text(s2) == t1);
  }
  for (uint64_t seed : {7u, 11u}) {
    ScenarioSpec s = random_scenario(seed);
    std::string t1 = scenario_to_text(s);
    ScenarioSpec s2 = parse_scenario_text(t1);
    CHECK(scenario_to_text(s2) == t1);
    VoxelDomain a = rasterize(s), b = rasterize(s2);
    CHECK(a.dims == b.dims);
    CHECK(a.inside == b.inside);
    CHECK(a.blocked == b.blocked);
  }
}

TEST_CASE("dilation keeps the cell topology") {
  ScenarioSpec s = built_in_scenario("square-edge");
  s.resolution = 16;
  ScenarioSpec s2 = scale_scenario(s, 2.0);
  VoxelDomain a = rasterize(s), b = rasterize(s2);
  CHECK(b.h == doctest::Approx(2.0 * a.h).epsilon(1e-15));
  CHECK(a.dims == b.dims);
  CHECK(a.inside == b.inside);
  for (int k = 0; k < a.d; ++k)
    CHECK(b.origin[k] == doctest::Approx(2.0 * a.origin[k]).epsilon(1e-14));
}

TEST_CASE("distance transform equals brute-force nearest neighbor") {
  oracles::Built b = oracles::build_named("square-edge", 8);
  DistanceField df = distance_to_D(b.dom, b.lab);
  CHECK(!df.infinite);
  std::vector<double> ref = oracles::brute_nn(b.dom, b.lab.d_points);
  double worst = 0.0;
  for (int64_t i = 0; i < b.dom.inside_count(); ++i)
    worst = std::max(worst, std::abs(df.v[static_cast<size_t>(i)] - ref[static_cast<size_t>(i)]));
  CHECK(worst <= 1e-15);
  CHECK(df.max_value > 0.0);

  DistanceField de = distance_to_points(b.dom, {});
  CHECK(de.infinite);
}

TEST_CASE("face adjacency by shared edge or vertex") {
  oracles::Built b = oracles::build_named("square-edge", 8);
  // collect the left-edge (axis 0) Dirichlet faces ordered by height
  std::vector<const BFace*> left;
  for (size_t i = 0; i < b.lab.faces.size(); ++i)
    if (b.lab.dirichlet[i] && b.lab.faces[i].axis == 0) left.push_back(&b.lab.faces[i]);
  REQUIRE(left.size() == 8);
  std::sort(left.begin(), left.end(),
            [](const BFace* a, const BFace* c) { return a->centroid[1] < c->centroid[1]; });
  CHECK(faces_touch(b.dom, *left[0], *left[1]));
  CHECK(!faces_touch(b.dom, *left[0], *left[4]));
}
