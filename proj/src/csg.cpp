#include "hardygeo/csg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace hardygeo {

using nlohmann::json;

// ---------------------------------------------------------------------------
// CSG

CsgPtr csg_box(Vec lo, Vec hi) {
  auto n = std::make_shared<CsgNode>();
  n->kind = CsgNode::Box;
  n->lo = lo;
  n->hi = hi;
  return n;
}
CsgPtr csg_ball(Vec c, double r) {
  auto n = std::make_shared<CsgNode>();
  n->kind = CsgNode::Ball;
  n->c = c;
  n->r = r;
  return n;
}
CsgPtr csg_shell(Vec c, double r_in, double r_out) {
  auto n = std::make_shared<CsgNode>();
  n->kind = CsgNode::Shell;
  n->c = c;
  n->r = r_in;
  n->r2 = r_out;
  return n;
}
CsgPtr csg_prism(int axis, double lo, double hi, std::vector<std::array<double, 2>> poly) {
  auto n = std::make_shared<CsgNode>();
  n->kind = CsgNode::Prism;
  n->axis = axis;
  n->lo[axis] = lo;
  n->hi[axis] = hi;
  n->poly = std::move(poly);
  return n;
}
CsgPtr csg_union(std::vector<CsgPtr> kids) {
  auto n = std::make_shared<CsgNode>();
  n->kind = CsgNode::Union;
  n->kids = std::move(kids);
  return n;
}
CsgPtr csg_difference(CsgPtr a, CsgPtr b) {
  auto n = std::make_shared<CsgNode>();
  n->kind = CsgNode::Difference;
  n->kids = {std::move(a), std::move(b)};
  return n;
}
CsgPtr csg_intersection(std::vector<CsgPtr> kids) {
  auto n = std::make_shared<CsgNode>();
  n->kind = CsgNode::Intersection;
  n->kids = std::move(kids);
  return n;
}

// even-odd crossing test; cell centers never sit on edges for the grids used
static bool point_in_poly(const std::vector<std::array<double, 2>>& poly, double u, double v) {
  bool in = false;
  size_t n = poly.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    double ui = poly[i][0], vi = poly[i][1];
    double uj = poly[j][0], vj = poly[j][1];
    if ((vi > v) != (vj > v)) {
      double t = (v - vi) / (vj - vi);
      if (u < ui + t * (uj - ui)) in = !in;
    }
  }
  return in;
}

bool csg_contains(const CsgNode& n, const Vec& p, int d) {
  switch (n.kind) {
    case CsgNode::Box:
      for (int a = 0; a < d; ++a)
        if (p[a] <= n.lo[a] || p[a] >= n.hi[a]) return false;
      return true;
    case CsgNode::Ball:
      return dist2(p, n.c, d) < n.r * n.r;
    case CsgNode::Shell: {
      double r2 = dist2(p, n.c, d);
      return r2 > n.r * n.r && r2 < n.r2 * n.r2;
    }
    case CsgNode::Prism: {
      if (d == 3 && (p[n.axis] <= n.lo[n.axis] || p[n.axis] >= n.hi[n.axis])) return false;
      int u = (n.axis == 0) ? 1 : 0;
      int v = (n.axis == 2) ? 1 : 2;
      if (d == 2) { u = 0; v = 1; }
      return point_in_poly(n.poly, p[u], p[v]);
    }
    case CsgNode::Union:
      for (const auto& k : n.kids)
        if (csg_contains(*k, p, d)) return true;
      return false;
    case CsgNode::Difference:
      return csg_contains(*n.kids[0], p, d) && !csg_contains(*n.kids[1], p, d);
    case CsgNode::Intersection:
      for (const auto& k : n.kids)
        if (!csg_contains(*k, p, d)) return false;
      return true;
  }
  return false;
}

void csg_bbox(const CsgNode& n, int d, Vec& lo, Vec& hi) {
  switch (n.kind) {
    case CsgNode::Box:
      lo = n.lo;
      hi = n.hi;
      return;
    case CsgNode::Ball:
    case CsgNode::Shell: {
      double r = (n.kind == CsgNode::Ball) ? n.r : n.r2;
      for (int a = 0; a < d; ++a) {
        lo[a] = n.c[a] - r;
        hi[a] = n.c[a] + r;
      }
      return;
    }
    case CsgNode::Prism: {
      int u = (n.axis == 0) ? 1 : 0;
      int v = (n.axis == 2) ? 1 : 2;
      if (d == 2) { u = 0; v = 1; }
      lo[u] = hi[u] = n.poly[0][0];
      lo[v] = hi[v] = n.poly[0][1];
      for (const auto& q : n.poly) {
        lo[u] = std::min(lo[u], q[0]);
        hi[u] = std::max(hi[u], q[0]);
        lo[v] = std::min(lo[v], q[1]);
        hi[v] = std::max(hi[v], q[1]);
      }
      lo[n.axis] = n.lo[n.axis];
      hi[n.axis] = n.hi[n.axis];
      return;
    }
    case CsgNode::Union:
    case CsgNode::Intersection: {
      csg_bbox(*n.kids[0], d, lo, hi);
      for (size_t i = 1; i < n.kids.size(); ++i) {
        Vec l2, h2;
        csg_bbox(*n.kids[i], d, l2, h2);
        for (int a = 0; a < d; ++a) {
          // intersection could shrink, but the union hull is always safe
          lo[a] = std::min(lo[a], l2[a]);
          hi[a] = std::max(hi[a], h2[a]);
        }
      }
      return;
    }
    case CsgNode::Difference:
      csg_bbox(*n.kids[0], d, lo, hi);
      return;
  }
}

// ---------------------------------------------------------------------------
// Predicates

static PredPtr mk(Pred::Kind k) {
  auto p = std::make_shared<Pred>();
  p->kind = k;
  return p;
}
PredPtr pred_all() { return mk(Pred::All); }
PredPtr pred_none() { return mk(Pred::None); }
PredPtr pred_sphere_dist(Vec c, double r, double tol) {
  auto p = std::make_shared<Pred>();
  p->kind = Pred::SphereDist;
  p->c = c;
  p->r = r;
  p->tol = tol;
  return p;
}
PredPtr pred_ball(Vec c, double r, double tol) {
  auto p = std::make_shared<Pred>();
  p->kind = Pred::BallIn;
  p->c = c;
  p->r = r;
  p->tol = tol;
  return p;
}
PredPtr pred_plane(int axis, double value, double tol) {
  auto p = std::make_shared<Pred>();
  p->kind = Pred::PlaneDist;
  p->axis = axis;
  p->value = value;
  p->tol = tol;
  return p;
}
PredPtr pred_halfspace(int axis, double value, int sign, double tol) {
  auto p = std::make_shared<Pred>();
  p->kind = Pred::HalfSpace;
  p->axis = axis;
  p->value = value;
  p->sign = sign;
  p->tol = tol;
  return p;
}
PredPtr pred_in_box(Vec lo, Vec hi, double tol) {
  auto p = std::make_shared<Pred>();
  p->kind = Pred::InBox;
  p->lo = lo;
  p->hi = hi;
  p->tol = tol;
  return p;
}
PredPtr pred_on_crack() { return mk(Pred::OnCrack); }
PredPtr pred_outer_face() { return mk(Pred::OuterFace); }
PredPtr pred_not(PredPtr p) {
  auto q = mk(Pred::NotP);
  const_cast<Pred*>(q.get())->kids = {std::move(p)};
  return q;
}
PredPtr pred_any(std::vector<PredPtr> kids) {
  auto q = mk(Pred::AnyOf);
  const_cast<Pred*>(q.get())->kids = std::move(kids);
  return q;
}
PredPtr pred_all_of(std::vector<PredPtr> kids) {
  auto q = mk(Pred::AllOf);
  const_cast<Pred*>(q.get())->kids = std::move(kids);
  return q;
}

bool pred_eval(const Pred& p, const Vec& x, bool is_crack, int d, double default_tol) {
  double tol = (p.tol >= 0.0) ? p.tol : default_tol;
  switch (p.kind) {
    case Pred::All: return true;
    case Pred::None: return false;
    case Pred::SphereDist: return std::fabs(dist(x, p.c, d) - p.r) <= tol;
    case Pred::BallIn: return dist(x, p.c, d) <= p.r + tol;
    case Pred::PlaneDist: return std::fabs(x[p.axis] - p.value) <= tol;
    case Pred::HalfSpace: return p.sign * (x[p.axis] - p.value) >= -tol;
    case Pred::InBox:
      for (int a = 0; a < d; ++a)
        if (x[a] < p.lo[a] - tol || x[a] > p.hi[a] + tol) return false;
      return true;
    case Pred::OnCrack: return is_crack;
    case Pred::OuterFace: return !is_crack;
    case Pred::NotP: return !pred_eval(*p.kids[0], x, is_crack, d, default_tol);
    case Pred::AnyOf:
      for (const auto& k : p.kids)
        if (pred_eval(*k, x, is_crack, d, default_tol)) return true;
      return false;
    case Pred::AllOf:
      for (const auto& k : p.kids)
        if (!pred_eval(*k, x, is_crack, d, default_tol)) return false;
      return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Regions

bool Region::contains(const Vec& x, int d) const {
  bool in = false;
  for (const auto& pc : pieces) {
    if (pc.is_cylinder) {
      if (x[pc.axis] < pc.lo[pc.axis] || x[pc.axis] > pc.hi[pc.axis]) continue;
      double s = 0.0;
      for (int a = 0; a < d; ++a) {
        if (a == pc.axis) continue;
        double t = x[a] - pc.c[a];
        s += t * t;
      }
      if (s <= pc.r * pc.r) {
        in = true;
        break;
      }
    } else {
      bool ok = true;
      for (int a = 0; a < d; ++a)
        if (x[a] < pc.lo[a] || x[a] > pc.hi[a]) {
          ok = false;
          break;
        }
      if (ok) {
        in = true;
        break;
      }
    }
  }
  return complement ? !in : in;
}

// ---------------------------------------------------------------------------
// Built-in scenarios

static Region::Piece region_box(Vec lo, Vec hi) {
  Region::Piece p;
  p.lo = lo;
  p.hi = hi;
  return p;
}
static Region::Piece region_cyl(int axis, Vec c, double r, double a, double b) {
  Region::Piece p;
  p.is_cylinder = true;
  p.axis = axis;
  p.c = c;
  p.r = r;
  p.lo[axis] = a;
  p.hi[axis] = b;
  return p;
}

ScenarioSpec built_in_scenario(const std::string& name) {
  ScenarioSpec s;
  s.name = name;
  if (name == "interval") {
    s.d = 1;
    s.resolution = 256;
    s.solid = csg_box(vec(0), vec(1));
    s.dirichlet = pred_plane(0, 0.0);
    s.glue_patches = {{vec(0.6), vec(1.5), 0, +1}};
  } else if (name == "square-edge") {
    s.d = 2;
    s.resolution = 64;
    s.solid = csg_box(vec(0, 0), vec(1, 1));
    s.dirichlet = pred_plane(0, 0.0);
    s.glue_patches = {
        {vec(0.5, -0.2), vec(1.5, 1.2), 0, +1},
        {vec(-0.2, 0.5), vec(1.2, 1.5), 1, +1},
        {vec(-0.2, -0.5), vec(1.2, 0.5), 1, -1},
    };
  } else if (name == "slit-square") {
    s.d = 2;
    s.resolution = 32;
    s.solid = csg_box(vec(0, 0), vec(1, 1));
    CrackPatch cp;
    cp.axis = 1;
    cp.plane = 0.5;
    cp.seg_lo = 0.25;
    cp.seg_hi = 0.75;
    s.cracks = {cp};
    s.dirichlet = pred_on_crack();
    s.glue_patches = {
        {vec(-0.5, -0.2), vec(0.2, 1.2), 0, -1},
        {vec(0.8, -0.2), vec(1.5, 1.2), 0, +1},
        {vec(-0.2, 0.5), vec(1.2, 1.5), 1, +1},
        {vec(-0.2, -0.5), vec(1.2, 0.5), 1, -1},
    };
  } else if (name == "annulus-mixed") {
    s.d = 2;
    s.resolution = 32;
    s.solid = csg_shell(vec(0, 0), 1.0, 2.0);
    s.dirichlet = pred_any({pred_sphere_dist(vec(0, 0), 1.0),
                            pred_all_of({pred_sphere_dist(vec(0, 0), 2.0),
                                         pred_halfspace(0, 0.0, +1)})});
    s.glue_patches = {
        {vec(-1.0, 1.25), vec(1.0, 2.75), 1, +1},
        {vec(-1.0, -2.75), vec(1.0, -1.25), 1, -1},
        {vec(-2.75, -0.7), vec(-1.25, 0.7), 0, -1},
        {vec(-2.3, 0.5), vec(-0.8, 2.3), 0, -1},
        {vec(-2.3, -2.3), vec(-0.8, -0.5), 0, -1},
    };
  } else if (name == "cube-crack") {
    s.d = 3;
    s.resolution = 16;
    s.solid = csg_box(vec(0, 0, 0), vec(1, 1, 1));
    CrackPatch cp;
    cp.axis = 2;
    cp.plane = 0.5;
    cp.poly = {{0.0, 0.2}, {0.6, 0.2}, {0.6, 0.8}, {0.0, 0.8}};
    s.cracks = {cp};
    s.dirichlet = pred_any({pred_on_crack(), pred_plane(0, 0.0)});
    s.glue_patches = {
        {vec(0.5, -0.2, -0.2), vec(1.5, 1.2, 1.2), 0, +1},
        {vec(-0.2, -0.5, -0.2), vec(1.2, 0.45, 1.2), 1, -1},
        {vec(-0.2, 0.55, -0.2), vec(1.2, 1.5, 1.2), 1, +1},
        {vec(-0.2, -0.2, -0.5), vec(1.2, 1.2, 0.45), 2, -1},
        {vec(-0.2, -0.2, 0.55), vec(1.2, 1.2, 1.5), 2, +1},
    };
  } else if (name == "cube-triangle") {
    s.d = 3;
    s.resolution = 16;
    s.solid = csg_box(vec(0, 0, 0), vec(1, 1, 1));
    CrackPatch cp;
    cp.axis = 1;
    cp.plane = 0.5;
    cp.poly = {{0.3, 0.3}, {0.7, 0.3}, {0.5, 0.7}};
    s.cracks = {cp};
    // Dirichlet: all six sides except an open disk on the cover plate
    s.dirichlet = pred_all_of(
        {pred_outer_face(),
         pred_not(pred_all_of({pred_plane(2, 1.0), pred_ball(vec(0.5, 0.5, 1.0), 0.25)}))});
    s.glue_patches = {
        {vec(0.03, 0.03, 0.5), vec(0.97, 0.97, 1.5), 2, +1},
        {vec(0.1, 0.22, 0.1), vec(0.9, 0.78, 0.9), 1, +1},
    };
    Region u;
    u.complement = true;
    u.pieces = {region_box(vec(0.24, 0.40, 0.24), vec(0.76, 0.60, 0.76)),
                region_cyl(2, vec(0.5, 0.5, 0), 0.08, 0.86, 1.5)};
    Region v;
    v.pieces = {region_box(vec(0.16, 0.32, 0.16), vec(0.84, 0.68, 0.84)),
                region_cyl(2, vec(0.5, 0.5, 0), 0.17, 0.78, 1.5)};
    s.loc_u = u;
    s.loc_v = v;
  } else {
    throw Error(ErrorKind::Config, "unknown scenario: " + name);
  }
  return s;
}

std::vector<std::string> list_scenarios() {
  return {"interval",      "square-edge", "slit-square",
          "annulus-mixed", "cube-crack",  "cube-triangle"};
}

bool is_built_in_scenario(const std::string& name) {
  for (const auto& n : list_scenarios())
    if (n == name) return true;
  return false;
}

std::string scenario_description(const std::string& name) {
  if (name == "interval") return "unit interval, Dirichlet at the left endpoint";
  if (name == "square-edge") return "unit square, Dirichlet on the left edge";
  if (name == "slit-square") return "unit square with an internal horizontal slit carrying the Dirichlet condition";
  if (name == "annulus-mixed")
    return "annulus 1<|x|<2, Dirichlet on the inner circle and the right half of the outer circle";
  if (name == "cube-crack")
    return "unit cube with a flat interior crack attached to one wall; crack and that wall are Dirichlet";
  if (name == "cube-triangle")
    return "unit cube minus a flat triangle; Dirichlet on all six sides except a disk on the cover plate";
  return "";
}

// ---------------------------------------------------------------------------
// Seeded random CSG scenarios (2D) for bullet stress tests.

ScenarioSpec random_scenario(uint64_t seed) {
  Rng rng(seed * 6364136223846793005ULL + 1442695040888963407ULL);
  ScenarioSpec s;
  s.name = "random-" + std::to_string(seed);
  s.d = 2;
  s.resolution = 24 + 8 * static_cast<double>(rng.index(3));
  s.padding = 4;

  auto snap = [&](double lo, double hi) {
    // coordinates on a coarse lattice keep geometry away from face planes
    double t = rng.uniform(lo, hi);
    return std::round(t * 16.0) / 16.0 + 1.0 / 64.0;
  };

  CsgPtr base;
  if (rng.uniform() < 0.5) {
    base = csg_box(vec(snap(-0.1, 0.1), snap(-0.1, 0.1)), vec(snap(0.9, 1.1), snap(0.9, 1.1)));
  } else {
    base = csg_ball(vec(snap(0.4, 0.6), snap(0.4, 0.6)), rng.uniform(0.45, 0.6));
  }
  int nmods = 1 + static_cast<int>(rng.index(3));
  for (int m = 0; m < nmods; ++m) {
    double op = rng.uniform();
    Vec c = vec(snap(0.1, 0.9), snap(0.1, 0.9));
    double r = rng.uniform(0.12, 0.3);
    CsgPtr prim = (rng.uniform() < 0.6)
                      ? csg_ball(c, r)
                      : csg_box(vec(c[0] - r, c[1] - r), vec(c[0] + r, c[1] + r));
    if (op < 0.55) {
      base = csg_difference(base, prim);
    } else {
      base = csg_union({base, prim});
    }
  }
  s.solid = base;

  double dp = rng.uniform();
  if (dp < 0.3) {
    s.dirichlet = pred_halfspace(0, snap(0.2, 0.8), rng.uniform() < 0.5 ? +1 : -1);
  } else if (dp < 0.55) {
    s.dirichlet = pred_halfspace(1, snap(0.2, 0.8), rng.uniform() < 0.5 ? +1 : -1);
  } else if (dp < 0.8) {
    s.dirichlet = pred_ball(vec(snap(0.1, 0.9), snap(0.1, 0.9)), rng.uniform(0.25, 0.6));
  } else if (dp < 0.92) {
    s.dirichlet = pred_all();
  } else {
    s.dirichlet = pred_none();
  }
  return s;
}

// ---------------------------------------------------------------------------
// Dilation

static CsgPtr scale_csg(const CsgPtr& n, double f) {
  auto m = std::make_shared<CsgNode>(*n);
  for (int a = 0; a < 3; ++a) {
    m->lo[a] *= f;
    m->hi[a] *= f;
    m->c[a] *= f;
  }
  m->r *= f;
  m->r2 *= f;
  for (auto& q : m->poly) {
    q[0] *= f;
    q[1] *= f;
  }
  m->kids.clear();
  for (const auto& k : n->kids) m->kids.push_back(scale_csg(k, f));
  return m;
}

static PredPtr scale_pred(const PredPtr& p, double f) {
  auto q = std::make_shared<Pred>(*p);
  for (int a = 0; a < 3; ++a) {
    q->c[a] *= f;
    q->lo[a] *= f;
    q->hi[a] *= f;
  }
  q->r *= f;
  q->value *= f;
  if (q->tol > 0.0) q->tol *= f;
  q->kids.clear();
  for (const auto& k : p->kids) q->kids.push_back(scale_pred(k, f));
  return q;
}

ScenarioSpec scale_scenario(const ScenarioSpec& s, double factor) {
  ScenarioSpec t = s;
  t.name = s.name + "-x" + std::to_string(factor);
  t.resolution = s.resolution / factor;
  t.solid = scale_csg(s.solid, factor);
  t.dirichlet = scale_pred(s.dirichlet, factor);
  for (auto& cp : t.cracks) {
    cp.plane *= factor;
    cp.seg_lo *= factor;
    cp.seg_hi *= factor;
    for (auto& q : cp.poly) {
      q[0] *= factor;
      q[1] *= factor;
    }
  }
  for (auto& gp : t.glue_patches) {
    for (int a = 0; a < 3; ++a) {
      gp.lo[a] *= factor;
      gp.hi[a] *= factor;
    }
  }
  auto scale_region = [&](std::optional<Region>& reg) {
    if (!reg) return;
    for (auto& pc : reg->pieces) {
      for (int a = 0; a < 3; ++a) {
        pc.lo[a] *= factor;
        pc.hi[a] *= factor;
        pc.c[a] *= factor;
      }
      pc.r *= factor;
    }
  };
  scale_region(t.loc_u);
  scale_region(t.loc_v);
  return t;
}

// ---------------------------------------------------------------------------
// Text format (JSON)

static json vec_to_json(const Vec& v, int d) {
  json a = json::array();
  for (int i = 0; i < d; ++i) a.push_back(v[i]);
  return a;
}
static Vec vec_from_json(const json& a) {
  Vec v = {0, 0, 0};
  for (size_t i = 0; i < a.size() && i < 3; ++i) v[i] = a[i].get<double>();
  return v;
}

static json csg_to_json(const CsgNode& n, int d) {
  json j;
  switch (n.kind) {
    case CsgNode::Box:
      j["prim"] = "box";
      j["lo"] = vec_to_json(n.lo, d);
      j["hi"] = vec_to_json(n.hi, d);
      break;
    case CsgNode::Ball:
      j["prim"] = "ball";
      j["center"] = vec_to_json(n.c, d);
      j["radius"] = n.r;
      break;
    case CsgNode::Shell:
      j["prim"] = "shell";
      j["center"] = vec_to_json(n.c, d);
      j["inner"] = n.r;
      j["outer"] = n.r2;
      break;
    case CsgNode::Prism: {
      j["prim"] = "prism";
      j["axis"] = n.axis;
      j["range"] = {n.lo[n.axis], n.hi[n.axis]};
      json poly = json::array();
      for (const auto& q : n.poly) poly.push_back({q[0], q[1]});
      j["poly"] = poly;
      break;
    }
    case CsgNode::Union:
    case CsgNode::Difference:
    case CsgNode::Intersection: {
      j["op"] = (n.kind == CsgNode::Union)      ? "union"
                : (n.kind == CsgNode::Difference) ? "difference"
                                                  : "intersection";
      json kids = json::array();
      for (const auto& k : n.kids) kids.push_back(csg_to_json(*k, d));
      j["args"] = kids;
      break;
    }
  }
  return j;
}

static CsgPtr csg_from_json(const json& j) {
  if (j.contains("prim")) {
    std::string p = j["prim"];
    if (p == "box") return csg_box(vec_from_json(j["lo"]), vec_from_json(j["hi"]));
    if (p == "ball") return csg_ball(vec_from_json(j["center"]), j["radius"].get<double>());
    if (p == "shell")
      return csg_shell(vec_from_json(j["center"]), j["inner"].get<double>(),
                       j["outer"].get<double>());
    if (p == "prism") {
      std::vector<std::array<double, 2>> poly;
      for (const auto& q : j["poly"]) poly.push_back({q[0].get<double>(), q[1].get<double>()});
      return csg_prism(j["axis"].get<int>(), j["range"][0].get<double>(),
                       j["range"][1].get<double>(), std::move(poly));
    }
    throw Error(ErrorKind::Config, "unknown primitive: " + p);
  }
  std::string op = j.at("op");
  std::vector<CsgPtr> kids;
  for (const auto& k : j.at("args")) kids.push_back(csg_from_json(k));
  if (op == "union") return csg_union(std::move(kids));
  if (op == "intersection") return csg_intersection(std::move(kids));
  if (op == "difference") {
    if (kids.size() != 2) throw Error(ErrorKind::Config, "difference takes two operands");
    return csg_difference(kids[0], kids[1]);
  }
  throw Error(ErrorKind::Config, "unknown op: " + op);
}

static json pred_to_json(const Pred& p, int d) {
  json j;
  switch (p.kind) {
    case Pred::All: j["pred"] = "all"; break;
    case Pred::None: j["pred"] = "none"; break;
    case Pred::SphereDist:
      j["pred"] = "sphere_dist";
      j["center"] = vec_to_json(p.c, d);
      j["radius"] = p.r;
      break;
    case Pred::BallIn:
      j["pred"] = "ball";
      j["center"] = vec_to_json(p.c, d);
      j["radius"] = p.r;
      break;
    case Pred::PlaneDist:
      j["pred"] = "plane";
      j["axis"] = p.axis;
      j["value"] = p.value;
      break;
    case Pred::HalfSpace:
      j["pred"] = "halfspace";
      j["axis"] = p.axis;
      j["value"] = p.value;
      j["sign"] = p.sign;
      break;
    case Pred::InBox:
      j["pred"] = "in_box";
      j["lo"] = vec_to_json(p.lo, d);
      j["hi"] = vec_to_json(p.hi, d);
      break;
    case Pred::OnCrack: j["pred"] = "on_crack"; break;
    case Pred::OuterFace: j["pred"] = "outer"; break;
    case Pred::NotP:
      j["pred"] = "not";
      j["arg"] = pred_to_json(*p.kids[0], d);
      break;
    case Pred::AnyOf:
    case Pred::AllOf: {
      j["pred"] = (p.kind == Pred::AnyOf) ? "any" : "all_of";
      json kids = json::array();
      for (const auto& k : p.kids) kids.push_back(pred_to_json(*k, d));
      j["args"] = kids;
      break;
    }
  }
  if (p.tol >= 0.0) j["tol"] = p.tol;
  return j;
}

static PredPtr pred_from_json(const json& j) {
  std::string p = j.at("pred");
  double tol = j.value("tol", -1.0);
  if (p == "all") return pred_all();
  if (p == "none") return pred_none();
  if (p == "sphere_dist")
    return pred_sphere_dist(vec_from_json(j["center"]), j["radius"].get<double>(), tol);
  if (p == "ball") return pred_ball(vec_from_json(j["center"]), j["radius"].get<double>(), tol);
  if (p == "plane") return pred_plane(j["axis"].get<int>(), j["value"].get<double>(), tol);
  if (p == "halfspace")
    return pred_halfspace(j["axis"].get<int>(), j["value"].get<double>(), j.value("sign", 1), tol);
  if (p == "in_box") return pred_in_box(vec_from_json(j["lo"]), vec_from_json(j["hi"]),
                                        std::max(tol, 0.0));
  if (p == "on_crack") return pred_on_crack();
  if (p == "outer") return pred_outer_face();
  if (p == "not") return pred_not(pred_from_json(j["arg"]));
  std::vector<PredPtr> kids;
  for (const auto& k : j.at("args")) kids.push_back(pred_from_json(k));
  if (p == "any") return pred_any(std::move(kids));
  if (p == "all_of") return pred_all_of(std::move(kids));
  throw Error(ErrorKind::Config, "unknown predicate: " + p);
}

static json region_to_json(const Region& r, int d) {
  json j;
  j["complement"] = r.complement;
  json pieces = json::array();
  for (const auto& pc : r.pieces) {
    json pj;
    if (pc.is_cylinder) {
      pj["cylinder"] = {{"axis", pc.axis},
                        {"center", vec_to_json(pc.c, d)},
                        {"radius", pc.r},
                        {"range", {pc.lo[pc.axis], pc.hi[pc.axis]}}};
    } else {
      pj["box"] = {{"lo", vec_to_json(pc.lo, d)}, {"hi", vec_to_json(pc.hi, d)}};
    }
    pieces.push_back(pj);
  }
  j["pieces"] = pieces;
  return j;
}

static Region region_from_json(const json& j) {
  Region r;
  r.complement = j.value("complement", false);
  for (const auto& pj : j.at("pieces")) {
    Region::Piece pc;
    if (pj.contains("cylinder")) {
      const auto& c = pj["cylinder"];
      pc.is_cylinder = true;
      pc.axis = c["axis"].get<int>();
      pc.c = vec_from_json(c["center"]);
      pc.r = c["radius"].get<double>();
      pc.lo[pc.axis] = c["range"][0].get<double>();
      pc.hi[pc.axis] = c["range"][1].get<double>();
    } else {
      const auto& b = pj["box"];
      pc.lo = vec_from_json(b["lo"]);
      pc.hi = vec_from_json(b["hi"]);
    }
    r.pieces.push_back(pc);
  }
  return r;
}

std::string scenario_to_text(const ScenarioSpec& s) {
  json j;
  j["name"] = s.name;
  j["dimension"] = s.d;
  j["resolution"] = s.resolution;
  j["padding"] = s.padding;
  j["solid"] = csg_to_json(*s.solid, s.d);
  if (!s.cracks.empty()) {
    json cracks = json::array();
    for (const auto& cp : s.cracks) {
      json cj;
      cj["axis"] = cp.axis;
      cj["plane"] = cp.plane;
      if (cp.poly.empty()) {
        cj["segment"] = {cp.seg_lo, cp.seg_hi};
      } else {
        json poly = json::array();
        for (const auto& q : cp.poly) poly.push_back({q[0], q[1]});
        cj["poly"] = poly;
      }
      cracks.push_back(cj);
    }
    j["cracks"] = cracks;
  }
  j["dirichlet"] = pred_to_json(*s.dirichlet, s.d);
  if (!s.glue_patches.empty()) {
    json patches = json::array();
    for (const auto& gp : s.glue_patches)
      patches.push_back({{"lo", vec_to_json(gp.lo, s.d)},
                         {"hi", vec_to_json(gp.hi, s.d)},
                         {"axis", gp.axis},
                         {"dir", gp.dir}});
    j["glue_patches"] = patches;
  }
  if (s.loc_u) j["loc_u"] = region_to_json(*s.loc_u, s.d);
  if (s.loc_v) j["loc_v"] = region_to_json(*s.loc_v, s.d);
  return j.dump(2) + "\n";
}

ScenarioSpec parse_scenario_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw Error(ErrorKind::Config, std::string("scenario parse error: ") + e.what());
  }
  ScenarioSpec s;
  try {
    s.name = j.value("name", "scenario");
    s.d = j.at("dimension").get<int>();
    if (s.d < 1 || s.d > 3) throw Error(ErrorKind::BadDimension, "dimension must be 1, 2 or 3");
    s.resolution = j.at("resolution").get<double>();
    s.padding = j.value("padding", 6);
    if (s.padding < 1) throw Error(ErrorKind::Config, "padding must be >= 1");
    s.solid = csg_from_json(j.at("solid"));
    if (j.contains("cracks")) {
      for (const auto& cj : j["cracks"]) {
        CrackPatch cp;
        cp.axis = cj.at("axis").get<int>();
        cp.plane = cj.at("plane").get<double>();
        if (cj.contains("segment")) {
          cp.seg_lo = cj["segment"][0].get<double>();
          cp.seg_hi = cj["segment"][1].get<double>();
        } else {
          for (const auto& q : cj.at("poly"))
            cp.poly.push_back({q[0].get<double>(), q[1].get<double>()});
        }
        s.cracks.push_back(cp);
      }
    }
    s.dirichlet = j.contains("dirichlet") ? pred_from_json(j["dirichlet"]) : pred_none();
    if (j.contains("glue_patches")) {
      for (const auto& pj : j["glue_patches"]) {
        GluePatch gp;
        gp.lo = vec_from_json(pj.at("lo"));
        gp.hi = vec_from_json(pj.at("hi"));
        gp.axis = pj.at("axis").get<int>();
        gp.dir = pj.at("dir").get<int>();
        s.glue_patches.push_back(gp);
      }
    }
    if (j.contains("loc_u")) s.loc_u = region_from_json(j["loc_u"]);
    if (j.contains("loc_v")) s.loc_v = region_from_json(j["loc_v"]);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorKind::Config, std::string("scenario field error: ") + e.what());
  }
  return s;
}

ScenarioSpec parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot open scenario file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario_text(ss.str());
}

}  // namespace hardygeo
