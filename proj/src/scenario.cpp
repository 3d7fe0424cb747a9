#include "hardygeo/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hardygeo/parallel.hpp"

namespace hardygeo {

// even-odd crossing test on the crack polygon (transverse coordinates)
static bool crack_poly_contains(const CrackPatch& cp, double u, double v) {
  bool in = false;
  size_t n = cp.poly.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    double ui = cp.poly[i][0], vi = cp.poly[i][1];
    double uj = cp.poly[j][0], vj = cp.poly[j][1];
    if ((vi > v) != (vj > v)) {
      double t = (v - vi) / (vj - vi);
      if (u < ui + t * (uj - ui)) in = !in;
    }
  }
  return in;
}

// largest face-connected component under the unblocked adjacency; returns
// the number of components and shrinks the mask in place
static int prune_to_largest(VoxelDomain& dom) {
  int64_t n = dom.ncells();
  std::vector<int32_t> label(static_cast<size_t>(n), -1);
  std::vector<int64_t> stack, sizes;
  int32_t ncomp = 0;
  for (int64_t s = 0; s < n; ++s) {
    if (!dom.is_inside(s) || label[static_cast<size_t>(s)] >= 0) continue;
    int64_t count = 0;
    stack.push_back(s);
    label[static_cast<size_t>(s)] = ncomp;
    while (!stack.empty()) {
      int64_t l = stack.back();
      stack.pop_back();
      ++count;
      IVec c = dom.unlin(l);
      for (int a = 0; a < dom.d; ++a) {
        for (int dir = -1; dir <= 1; dir += 2) {
          IVec nb = c;
          nb[a] += dir;
          if (!dom.is_inside(nb)) continue;
          int64_t lower = (dir > 0) ? l : dom.lin(nb);
          if (dom.is_blocked(lower, a)) continue;
          int64_t nl = dom.lin(nb);
          if (label[static_cast<size_t>(nl)] < 0) {
            label[static_cast<size_t>(nl)] = ncomp;
            stack.push_back(nl);
          }
        }
      }
    }
    sizes.push_back(count);
    ++ncomp;
  }
  if (ncomp <= 1) return ncomp;
  int32_t best = 0;
  for (int32_t k = 1; k < ncomp; ++k)
    if (sizes[static_cast<size_t>(k)] > sizes[static_cast<size_t>(best)]) best = k;
  for (int64_t l = 0; l < n; ++l)
    if (dom.is_inside(l) && label[static_cast<size_t>(l)] != best)
      dom.inside[static_cast<size_t>(l)] = 0;
  // blocked faces must stay between two inside cells
  for (int64_t l = 0; l < n; ++l) {
    for (int a = 0; a < dom.d; ++a) {
      if (!dom.is_blocked(l, a)) continue;
      IVec c = dom.unlin(l);
      IVec nb = c;
      nb[a] += 1;
      if (!dom.is_inside(l) || !dom.is_inside(nb)) dom.set_blocked(l, a, false);
    }
  }
  return ncomp;
}

VoxelDomain rasterize(const ScenarioSpec& spec) {
  if (spec.d < 1 || spec.d > 3)
    throw Error(ErrorKind::BadDimension, "dimension must be 1, 2 or 3");
  if (!spec.solid) throw Error(ErrorKind::EmptyDomain, "scenario has no solid");
  if (spec.resolution <= 0) throw Error(ErrorKind::Config, "resolution must be positive");

  VoxelDomain dom;
  dom.d = spec.d;
  dom.h = 1.0 / spec.resolution;
  dom.name = spec.name;

  Vec lo{0, 0, 0}, hi{0, 0, 0};
  csg_bbox(*spec.solid, spec.d, lo, hi);
  for (int a = 0; a < spec.d; ++a) {
    int64_t lo_idx = static_cast<int64_t>(std::floor(lo[a] / dom.h + 1e-9));
    int64_t hi_idx = static_cast<int64_t>(std::ceil(hi[a] / dom.h - 1e-9));
    dom.dims[a] = (hi_idx - lo_idx) + 2 * spec.padding;
    dom.origin[a] = (static_cast<double>(lo_idx) - spec.padding) * dom.h;
  }

  int64_t n = dom.ncells();
  dom.inside.assign(static_cast<size_t>(n), 0);
  dom.blocked.assign(static_cast<size_t>(n) * 3, 0);
  const CsgNode& solid = *spec.solid;
  parallel_for(n, [&](int64_t l) {
    dom.inside[static_cast<size_t>(l)] = csg_contains(solid, dom.center(l), dom.d) ? 1 : 0;
  });

  int64_t count = 0;
  for (uint8_t b : dom.inside) count += b;
  if (count == 0) throw Error(ErrorKind::EmptyDomain, "no cell center lies in the solid");

  int ncomp = prune_to_largest(dom);
  if (ncomp > 1)
    dom.warning = "inside set had " + std::to_string(ncomp) +
                  " components; kept the largest";

  // cracks: block every internal face whose centroid lies in the patch
  for (const auto& cp : spec.cracks) {
    if (cp.axis < 0 || cp.axis >= spec.d)
      throw Error(ErrorKind::Config, "crack axis outside the dimension");
    int64_t k = std::llround((cp.plane - dom.origin[cp.axis]) / dom.h);
    if (k <= 0 || k >= dom.dims[cp.axis])
      throw Error(ErrorKind::CrackNotInterior, "crack plane outside the grid");
    int u = (cp.axis == 0) ? 1 : 0;
    int v = (cp.axis == 2) ? 1 : 2;
    int64_t nblocked = 0;
    for (int64_t l = 0; l < n; ++l) {
      IVec c = dom.unlin(l);
      if (c[cp.axis] != k - 1) continue;  // lower cell of a candidate face
      Vec ctr = dom.center(l);
      bool hit;
      if (spec.d == 2) {
        hit = ctr[u] >= cp.seg_lo && ctr[u] <= cp.seg_hi;
      } else {
        hit = crack_poly_contains(cp, ctr[u], ctr[v]);
      }
      if (!hit) continue;
      IVec nb = c;
      nb[cp.axis] += 1;
      if (!dom.is_inside(l) || !dom.is_inside(nb))
        throw Error(ErrorKind::CrackNotInterior,
                    "crack face not between two inside cells");
      dom.set_blocked(l, cp.axis, true);
      ++nblocked;
    }
    if (nblocked == 0)
      throw Error(ErrorKind::CrackNotInterior, "crack patch hits no internal face");
  }

  // a crack may disconnect the domain; keep the dominant piece then too
  if (!spec.cracks.empty()) {
    int nc2 = prune_to_largest(dom);
    if (nc2 > 1)
      dom.warning += std::string(dom.warning.empty() ? "" : "; ") +
                     "cracks disconnected the inside set; kept the largest part";
  }

  dom.finalize();
  return dom;
}

bool faces_touch(const VoxelDomain& dom, const BFace& a, const BFace& b) {
  if (a.fid == b.fid) return false;
  const double tiny = 1e-9 * dom.h;
  for (int k = 0; k < dom.d; ++k) {
    double ea = (k == a.axis) ? 0.0 : dom.h * 0.5;
    double eb = (k == b.axis) ? 0.0 : dom.h * 0.5;
    if (std::fabs(a.centroid[k] - b.centroid[k]) > ea + eb + tiny) return false;
  }
  return true;
}

BoundaryLabeling label_boundary(const VoxelDomain& dom, const ScenarioSpec& spec) {
  BoundaryLabeling lab;
  lab.faces = boundary_faces(dom);
  size_t nf = lab.faces.size();
  lab.dirichlet.assign(nf, 0);
  for (size_t i = 0; i < nf; ++i) lab.index[lab.faces[i].fid] = static_cast<int32_t>(i);

  const double tol = dom.h * 0.5;
  const Pred& pred = *spec.dirichlet;
  parallel_for(static_cast<int64_t>(nf), [&](int64_t i) {
    const BFace& f = lab.faces[static_cast<size_t>(i)];
    bool crack = (f.kind == 2);
    lab.dirichlet[static_cast<size_t>(i)] =
        pred_eval(pred, f.centroid, crack, dom.d, tol) ? 1 : 0;
  });

  // closure: a face whose whole edge/vertex neighborhood is Dirichlet joins D.
  // Neighbor lists are built once via a spatial hash on face centroids.
  if (nf > 1) {
    std::unordered_map<int64_t, std::vector<int32_t>> buckets;
    // +0.25 keeps centroids (at integer or half-integer multiples of h) away
    // from the floor() breakpoints
    auto key = [&](const Vec& p) {
      int64_t kx = static_cast<int64_t>(std::floor(p[0] / dom.h + 0.25));
      int64_t ky = static_cast<int64_t>(std::floor(p[1] / dom.h + 0.25));
      int64_t kz = static_cast<int64_t>(std::floor(p[2] / dom.h + 0.25));
      return (kx * 73856093) ^ (ky * 19349663) ^ (kz * 83492791);
    };
    for (size_t i = 0; i < nf; ++i)
      buckets[key(lab.faces[i].centroid)].push_back(static_cast<int32_t>(i));

    std::vector<std::vector<int32_t>> nbrs(nf);
    for (size_t i = 0; i < nf; ++i) {
      const BFace& f = lab.faces[i];
      IVec base;
      for (int a = 0; a < 3; ++a)
        base[a] = static_cast<int64_t>(std::floor(f.centroid[a] / dom.h + 0.25));
      int rz = (dom.d > 2) ? 1 : 0;
      int ry = (dom.d > 1) ? 1 : 0;
      for (int64_t dz = -rz; dz <= rz; ++dz)
        for (int64_t dy = -ry; dy <= ry; ++dy)
          for (int64_t dx = -1; dx <= 1; ++dx) {
            int64_t k = ((base[0] + dx) * 73856093) ^ ((base[1] + dy) * 19349663) ^
                        ((base[2] + dz) * 83492791);
            auto it = buckets.find(k);
            if (it == buckets.end()) continue;
            for (int32_t j : it->second)
              if (static_cast<size_t>(j) != i && faces_touch(dom, f, lab.faces[static_cast<size_t>(j)]))
                nbrs[i].push_back(j);
          }
      std::sort(nbrs[i].begin(), nbrs[i].end());
      nbrs[i].erase(std::unique(nbrs[i].begin(), nbrs[i].end()), nbrs[i].end());
    }

    bool changed = true;
    while (changed) {
      changed = false;
      for (size_t i = 0; i < nf; ++i) {
        if (lab.dirichlet[i] || nbrs[i].empty()) continue;
        bool all_d = true;
        for (int32_t j : nbrs[i])
          if (!lab.dirichlet[static_cast<size_t>(j)]) {
            all_d = false;
            break;
          }
        if (all_d) {
          lab.dirichlet[i] = 1;
          changed = true;
        }
      }
    }
  }

  for (size_t i = 0; i < nf; ++i)
    if (lab.dirichlet[i]) lab.d_points.push_back(lab.faces[i].centroid);
  return lab;
}

DistanceField distance_to_points(const VoxelDomain& dom, const std::vector<Vec>& pts) {
  DistanceField df;
  int64_t nc = dom.inside_count();
  if (pts.empty()) {
    df.infinite = true;
    df.v.assign(static_cast<size_t>(nc), std::numeric_limits<double>::infinity());
    df.max_value = std::numeric_limits<double>::infinity();
    return df;
  }
  df.v.assign(static_cast<size_t>(nc), 0.0);
  parallel_for(nc, [&](int64_t i) {
    Vec p = dom.center(dom.cells[static_cast<size_t>(i)]);
    double best = std::numeric_limits<double>::infinity();
    for (const Vec& q : pts) best = std::min(best, dist2(p, q, dom.d));
    df.v[static_cast<size_t>(i)] = std::sqrt(best);
  });
  for (double t : df.v) df.max_value = std::max(df.max_value, t);
  return df;
}

DistanceField distance_to_D(const VoxelDomain& dom, const BoundaryLabeling& lab) {
  return distance_to_points(dom, lab.d_points);
}

}  // namespace hardygeo
