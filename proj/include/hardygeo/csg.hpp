#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hardygeo/common.hpp"

namespace hardygeo {

// ---------------------------------------------------------------------------
// CSG solids, evaluated exactly at cell centers.

struct CsgNode;
using CsgPtr = std::shared_ptr<const CsgNode>;

struct CsgNode {
  enum Kind { Box, Ball, Shell, Prism, Union, Difference, Intersection } kind;
  // Box: lo/hi. Ball: c, r. Shell: c, r (inner), r2 (outer).
  // Prism: 2D polygon `poly` in axes (u,v) extruded along `axis` over [lo[axis], hi[axis]].
  Vec lo = {0, 0, 0}, hi = {0, 0, 0}, c = {0, 0, 0};
  double r = 0.0, r2 = 0.0;
  int axis = 2;
  std::vector<std::array<double, 2>> poly;
  std::vector<CsgPtr> kids;
};

CsgPtr csg_box(Vec lo, Vec hi);
CsgPtr csg_ball(Vec c, double r);
CsgPtr csg_shell(Vec c, double r_in, double r_out);
CsgPtr csg_prism(int axis, double lo, double hi, std::vector<std::array<double, 2>> poly);
CsgPtr csg_union(std::vector<CsgPtr> kids);
CsgPtr csg_difference(CsgPtr a, CsgPtr b);
CsgPtr csg_intersection(std::vector<CsgPtr> kids);

bool csg_contains(const CsgNode& n, const Vec& p, int d);
void csg_bbox(const CsgNode& n, int d, Vec& lo, Vec& hi);

// ---------------------------------------------------------------------------
// Measure-zero crack: an axis-aligned planar patch, realized as blocked faces.
// The plane is snapped to the nearest grid face plane. For d=2 the patch is a
// segment [seg_lo, seg_hi] in the transverse coordinate; for d=3 it is a
// convex polygon `poly` in the two transverse axes (ascending order).
struct CrackPatch {
  int axis = 1;
  double plane = 0.5;
  double seg_lo = 0.0, seg_hi = 0.0;
  std::vector<std::array<double, 2>> poly;
};

// ---------------------------------------------------------------------------
// Point-wise boundary predicate with tolerance (tol < 0 means h/2 at
// evaluation time). Composable; selects the Dirichlet part of the boundary.
struct Pred;
using PredPtr = std::shared_ptr<const Pred>;

struct Pred {
  enum Kind {
    All, None,
    SphereDist,   // | |x-c| - r | <= tol
    BallIn,       // |x-c| <= r + tol
    PlaneDist,    // | x[axis] - value | <= tol
    HalfSpace,    // sign * (x[axis] - value) >= -tol
    InBox,        // lo - tol <= x <= hi + tol componentwise
    OnCrack,      // face is a blocked (crack) face
    OuterFace,    // face is an inside/outside face
    NotP, AnyOf, AllOf
  } kind = All;
  Vec c = {0, 0, 0}, lo = {0, 0, 0}, hi = {0, 0, 0};
  double r = 0.0, value = 0.0, tol = -1.0;
  int axis = 0, sign = 1;
  std::vector<PredPtr> kids;
};

PredPtr pred_all();
PredPtr pred_none();
PredPtr pred_sphere_dist(Vec c, double r, double tol = -1.0);
PredPtr pred_ball(Vec c, double r, double tol = -1.0);
PredPtr pred_plane(int axis, double value, double tol = -1.0);
PredPtr pred_halfspace(int axis, double value, int sign, double tol = -1.0);
PredPtr pred_in_box(Vec lo, Vec hi, double tol = 0.0);
PredPtr pred_on_crack();
PredPtr pred_outer_face();
PredPtr pred_not(PredPtr p);
PredPtr pred_any(std::vector<PredPtr> kids);
PredPtr pred_all_of(std::vector<PredPtr> kids);

bool pred_eval(const Pred& p, const Vec& x, bool is_crack, int d, double default_tol);

// ---------------------------------------------------------------------------
// Geometric cell regions (for the localization cover U/V). A region is a
// union of boxes and axis-aligned cylinders, optionally complemented.
struct Region {
  struct Piece {
    bool is_cylinder = false;
    Vec lo = {0, 0, 0}, hi = {0, 0, 0};  // box, or axis range via lo/hi[axis]
    Vec c = {0, 0, 0};                   // cylinder center (transverse coords used)
    double r = 0.0;
    int axis = 2;
  };
  std::vector<Piece> pieces;
  bool complement = false;
  bool contains(const Vec& x, int d) const;
};

// Reflection patch for the glued extension: an index-free geometric box, the
// reflection axis, and the fill direction (+1 fills above the per-column run,
// -1 below).
struct GluePatch {
  Vec lo = {0, 0, 0}, hi = {0, 0, 0};
  int axis = 0;
  int dir = +1;
};

// ---------------------------------------------------------------------------
struct ScenarioSpec {
  std::string name;
  int d = 2;
  double resolution = 32.0;  // cells per unit length
  int padding = 6;           // collar cells around the solid's bounding box
  CsgPtr solid;
  std::vector<CrackPatch> cracks;
  PredPtr dirichlet;
  std::vector<GluePatch> glue_patches;       // empty: no extension cover shipped
  std::optional<Region> loc_u, loc_v;        // localization cover, if shipped
};

std::vector<std::string> list_scenarios();
std::string scenario_description(const std::string& name);
ScenarioSpec built_in_scenario(const std::string& name);
bool is_built_in_scenario(const std::string& name);

// Seeded random CSG scenario (2D), for bullet-construction stress tests.
ScenarioSpec random_scenario(uint64_t seed);

// Uniform dilation by s: geometry * s, resolution / s (same cell topology).
ScenarioSpec scale_scenario(const ScenarioSpec& s, double factor);

// Text format (JSON): see README for the schema.
ScenarioSpec parse_scenario_file(const std::string& path);
ScenarioSpec parse_scenario_text(const std::string& text);
std::string scenario_to_text(const ScenarioSpec& s);

}  // namespace hardygeo
