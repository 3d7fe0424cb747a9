#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "hardygeo/scenario.hpp"
#include "hardygeo/topology.hpp"
#include "oracles.hpp"

using namespace hardygeo;

// fresh labeling of a (possibly rebuilt) domain that keeps the original
// Dirichlet flags, looked up by face id
static BoundaryLabeling relabel(const VoxelDomain& dom, const BoundaryLabeling& orig) {
  BoundaryLabeling lab;
  lab.faces = boundary_faces(dom);
  lab.dirichlet.assign(lab.faces.size(), 0);
  for (size_t i = 0; i < lab.faces.size(); ++i) {
    lab.index[lab.faces[i].fid] = static_cast<int32_t>(i);
    auto it = orig.index.find(lab.faces[i].fid);
    if (it != orig.index.end() && orig.dirichlet[static_cast<size_t>(it->second)]) {
      lab.dirichlet[i] = 1;
      lab.d_points.push_back(lab.faces[i].centroid);
    }
  }
  return lab;
}

TEST_CASE("component labels are canonical across scan order") {
  oracles::Built b = oracles::build_named("square-edge", 16);
  Rng rng(42);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<uint8_t> mask(static_cast<size_t>(b.dom.ncells()), 0);
    for (int64_t l = 0; l < b.dom.ncells(); ++l)
      if (b.dom.is_inside(l) && rng.uniform() < 0.55) mask[static_cast<size_t>(l)] = 1;
    ComponentLabeling cf = components(b.dom, mask, ScanOrder::Forward);
    ComponentLabeling cr = components(b.dom, mask, ScanOrder::Reverse);
    CHECK(cf.count == cr.count);
    CHECK(cf.label == cr.label);
    CHECK(cf.sizes == cr.sizes);
    int64_t on = 0, labeled = 0;
    for (size_t i = 0; i < mask.size(); ++i) {
      on += mask[i];
      labeled += cf.label[i] >= 0;
    }
    CHECK(on == labeled);
    int64_t total = 0;
    for (int64_t sz : cf.sizes) total += sz;
    CHECK(total == on);
  }
}

TEST_CASE("blocked faces split components") {
  oracles::Built b = oracles::build_named("interval", 8);
  VoxelDomain dom = b.dom;
  dom.set_blocked(dom.cells[3], 0, true);  // cut between the 4th and 5th cell
  ComponentLabeling cl = components(dom, dom.inside);
  CHECK(cl.count == 2);
  std::vector<int64_t> sz = cl.sizes;
  std::sort(sz.begin(), sz.end());
  CHECK(sz[0] == 4);
  CHECK(sz[1] == 4);
}

TEST_CASE("annulus bullet: one enclosed hole, one attached region") {
  for (double n : {32.0, 64.0}) {
    oracles::Built b = oracles::build_named("annulus-mixed", n);
    BulletDomain bu = build_bullet(b.dom, b.lab);
    int enclosed = 0, attached = 0;
    for (const HoleInfo& h : bu.holes) {
      if (h.cls == HoleClass::DirichletEnclosed) ++enclosed;
      if (h.cls == HoleClass::Attached) ++attached;
      CHECK(h.cls == classify_hole(h.shared_faces, h.shared_d_faces));
    }
    CHECK(enclosed == 1);
    CHECK(attached == 1);
    CHECK(bu.attached_cells > 0);
    CHECK(bu.boundary_type == "D ∪ ∂B");

    BulletCheck ck = verify_bullet(b.dom, b.lab, bu);
    CHECK(ck.pass);
    CHECK(ck.deterministic);
    CHECK(ck.discrepancies.empty());
    CHECK(ck.boundary_type == bu.boundary_type);

    // reversed scan gives the identical mask
    BulletDomain br = build_bullet(b.dom, b.lab, ScanOrder::Reverse);
    CHECK(br.dom.inside == bu.dom.inside);

    // rebuilding on the bullet is a fixpoint
    BoundaryLabeling lab2 = relabel(bu.dom, b.lab);
    BulletDomain bu2 = build_bullet(bu.dom, lab2);
    CHECK(bu2.attached_cells == 0);
    CHECK(bu2.dom.inside == bu.dom.inside);
  }
}

TEST_CASE("fully Dirichlet boundary yields pure type D") {
  ScenarioSpec s;
  s.name = "sq";
  s.d = 2;
  s.resolution = 16;
  s.solid = csg_box(vec(0, 0), vec(1, 1));
  s.dirichlet = pred_outer_face();
  VoxelDomain dom = rasterize(s);
  BoundaryLabeling lab = label_boundary(dom, s);
  BulletDomain bu = build_bullet(dom, lab);
  CHECK(bu.boundary_type == "D");
  CHECK(bu.attached_cells == 0);
  REQUIRE(bu.holes.size() == 1);
  CHECK(bu.holes[0].cls == HoleClass::DirichletEnclosed);
  CHECK(bu.holes[0].shared_faces == bu.holes[0].shared_d_faces);
  CHECK(verify_bullet(dom, lab, bu).pass);
}

TEST_CASE("star domain opens exactly the blocked E faces") {
  oracles::Built b = oracles::build_named("slit-square", 16);
  std::vector<int64_t> e;
  for (size_t i = 0; i < b.lab.faces.size(); ++i)
    if (b.lab.dirichlet[i] && b.lab.faces[i].kind == 2) e.push_back(b.lab.faces[i].fid);
  REQUIRE(e.size() == 8);

  StarDomain star = build_star(b.dom, e);
  CHECK(star.opened.size() == e.size());
  CHECK(star.estar_faces.empty());
  for (int64_t fid : star.opened) {
    int64_t lo, hi;
    star.dom.face_cells(fid, lo, hi);
    CHECK(!star.dom.is_blocked(lo, star.dom.face_axis(fid)));
  }
  size_t nb = boundary_faces(b.dom).size(), ns = boundary_faces(star.dom).size();
  CHECK(ns == nb - e.size());
  CHECK(star.xi_faces.size() + star.estar_faces.size() == ns);

  // an interior unblocked face is not an admissible E
  IVec mid = b.dom.unlin(b.dom.cells[b.dom.inside_count() / 2]);
  int64_t fid = b.dom.upper_face(mid, 0);
  int64_t lo, hi;
  b.dom.face_cells(fid, lo, hi);
  REQUIRE(b.dom.is_inside(lo));
  REQUIRE(b.dom.is_inside(hi));
  REQUIRE(!b.dom.is_blocked(lo, 0));
  try {
    build_star(b.dom, {fid});
    CHECK(false);
  } catch (const Error& err) {
    CHECK(err.kind == ErrorKind::ENotOnBoundary);
  }
}
