#include "hardygeo/topology.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "hardygeo/parallel.hpp"

namespace hardygeo {

namespace {

struct UnionFind {
  std::vector<int64_t> parent;
  explicit UnionFind(int64_t n) : parent(static_cast<size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int64_t find(int64_t x) {
    while (parent[static_cast<size_t>(x)] != x) {
      parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
      x = parent[static_cast<size_t>(x)];
    }
    return x;
  }
  void unite(int64_t a, int64_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) parent[static_cast<size_t>(b)] = a;
    else parent[static_cast<size_t>(a)] = b;
  }
};

bool open_between(const VoxelDomain& dom, const std::vector<uint8_t>& mask, int64_t l,
                  const IVec& c, int axis, int dir, int64_t& nl) {
  IVec nb = c;
  nb[axis] += dir;
  if (!dom.in_box(nb)) return false;
  nl = dom.lin(nb);
  if (!mask[static_cast<size_t>(nl)]) return false;
  int64_t lower = (dir > 0) ? l : nl;
  return !dom.is_blocked(lower, axis);
}

}  // namespace

ComponentLabeling components(const VoxelDomain& dom, const std::vector<uint8_t>& mask,
                             ScanOrder order) {
  int64_t n = dom.ncells();
  ComponentLabeling out;
  out.label.assign(static_cast<size_t>(n), -1);

  // slabs along the last used axis, labeled independently, then merged
  int last = dom.d - 1;
  int64_t extent = dom.dims[last];
  int64_t nslabs = std::clamp<int64_t>(extent / 4, 1, 64);
  std::vector<int64_t> cut(static_cast<size_t>(nslabs) + 1);
  for (int64_t s = 0; s <= nslabs; ++s) cut[static_cast<size_t>(s)] = extent * s / nslabs;

  // provisional label = least cell id reached so far within the slab
  std::vector<int64_t> prov(static_cast<size_t>(n), -1);
  parallel_for(nslabs, [&](int64_t s) {
    int64_t lo = cut[static_cast<size_t>(s)], hi = cut[static_cast<size_t>(s) + 1];
    std::vector<int64_t> stack;
    int64_t plane = dom.dims[0] * ((last == 2) ? dom.dims[1] : 1);
    int64_t begin = lo * ((last == 0) ? 1 : plane);
    int64_t end = hi * ((last == 0) ? 1 : plane);
    for (int64_t step = 0; step < end - begin; ++step) {
      int64_t seed = (order == ScanOrder::Forward) ? begin + step : end - 1 - step;
      if (!mask[static_cast<size_t>(seed)] || prov[static_cast<size_t>(seed)] >= 0) continue;
      prov[static_cast<size_t>(seed)] = seed;
      stack.push_back(seed);
      while (!stack.empty()) {
        int64_t l = stack.back();
        stack.pop_back();
        IVec c = dom.unlin(l);
        for (int a = 0; a < dom.d; ++a)
          for (int dir = -1; dir <= 1; dir += 2) {
            int64_t nl;
            if (!open_between(dom, mask, l, c, a, dir, nl)) continue;
            IVec nc = dom.unlin(nl);
            if (nc[last] < lo || nc[last] >= hi) continue;  // stay in the slab
            if (prov[static_cast<size_t>(nl)] < 0) {
              prov[static_cast<size_t>(nl)] = prov[static_cast<size_t>(l)];
              stack.push_back(nl);
            }
          }
      }
    }
  });

  // merge across slab interfaces
  std::unordered_map<int64_t, int64_t> roots;
  std::vector<int64_t> root_ids;
  for (int64_t l = 0; l < n; ++l) {
    int64_t p = prov[static_cast<size_t>(l)];
    if (p == l) {
      roots[p] = static_cast<int64_t>(root_ids.size());
      root_ids.push_back(p);
    }
  }
  UnionFind uf(static_cast<int64_t>(root_ids.size()));
  for (int64_t s = 1; s < nslabs; ++s) {
    int64_t plane_coord = cut[static_cast<size_t>(s)];
    // every cell in the first layer of slab s, linked to the previous layer
    IVec c;
    int64_t nx = dom.dims[0], ny = dom.dims[1], nz = dom.dims[2];
    auto visit = [&](const IVec& cc) {
      int64_t l = dom.lin(cc);
      if (!mask[static_cast<size_t>(l)]) return;
      int64_t nl;
      if (!open_between(dom, mask, l, cc, last, -1, nl)) return;
      uf.unite(roots.at(prov[static_cast<size_t>(l)]), roots.at(prov[static_cast<size_t>(nl)]));
    };
    if (last == 0) {
      c = {plane_coord, 0, 0};
      for (c[2] = 0; c[2] < nz; ++c[2])
        for (c[1] = 0; c[1] < ny; ++c[1]) visit(c);
    } else if (last == 1) {
      c = {0, plane_coord, 0};
      for (c[2] = 0; c[2] < nz; ++c[2])
        for (c[0] = 0; c[0] < nx; ++c[0]) visit(c);
    } else {
      c = {0, 0, plane_coord};
      for (c[1] = 0; c[1] < ny; ++c[1])
        for (c[0] = 0; c[0] < nx; ++c[0]) visit(c);
    }
  }

  // canonical component id: ascending least cell id of the merged class
  std::unordered_map<int64_t, int64_t> least;  // uf root -> least cell id
  for (int64_t l = 0; l < n; ++l) {
    int64_t p = prov[static_cast<size_t>(l)];
    if (p < 0) continue;
    int64_t r = uf.find(roots.at(p));
    auto it = least.find(r);
    if (it == least.end() || l < it->second) least[r] = l;
  }
  std::vector<int64_t> reps;
  for (auto& kv : least) reps.push_back(kv.second);
  std::sort(reps.begin(), reps.end());
  std::unordered_map<int64_t, int32_t> rep_to_id;
  for (size_t k = 0; k < reps.size(); ++k) rep_to_id[reps[k]] = static_cast<int32_t>(k);

  out.count = static_cast<int32_t>(reps.size());
  out.sizes.assign(reps.size(), 0);
  for (int64_t l = 0; l < n; ++l) {
    int64_t p = prov[static_cast<size_t>(l)];
    if (p < 0) continue;
    int32_t id = rep_to_id.at(least.at(uf.find(roots.at(p))));
    out.label[static_cast<size_t>(l)] = id;
    out.sizes[static_cast<size_t>(id)] += 1;
  }
  return out;
}

BulletDomain build_bullet(const VoxelDomain& dom, const BoundaryLabeling& lab,
                          ScanOrder order) {
  int64_t n = dom.ncells();
  std::vector<uint8_t> outside(static_cast<size_t>(n));
  for (int64_t l = 0; l < n; ++l)
    outside[static_cast<size_t>(l)] = dom.is_inside(l) ? 0 : 1;
  ComponentLabeling comp = components(dom, outside, order);

  BulletDomain bullet;
  bullet.holes.assign(static_cast<size_t>(comp.count), HoleInfo{});
  for (int32_t k = 0; k < comp.count; ++k) {
    bullet.holes[static_cast<size_t>(k)].comp = k;
    bullet.holes[static_cast<size_t>(k)].cells = comp.sizes[static_cast<size_t>(k)];
  }

  // inventory the faces each hole shares with Omega
  for (int64_t l = 0; l < n; ++l) {
    int32_t k = comp.label[static_cast<size_t>(l)];
    if (k < 0) continue;
    HoleInfo& h = bullet.holes[static_cast<size_t>(k)];
    IVec c = dom.unlin(l);
    for (int a = 0; a < dom.d; ++a) {
      if (c[a] == 0 || c[a] == dom.dims[a] - 1) h.touches_box = true;
      for (int dir = -1; dir <= 1; dir += 2) {
        IVec nb = c;
        nb[a] += dir;
        if (!dom.is_inside(nb)) continue;
        int64_t fid = (dir > 0) ? dom.upper_face(c, a) : dom.lower_face(c, a);
        auto it = lab.index.find(fid);
        h.shared_faces += 1;
        if (it != lab.index.end() && lab.dirichlet[static_cast<size_t>(it->second)])
          h.shared_d_faces += 1;
      }
    }
  }
  for (auto& h : bullet.holes) h.cls = classify_hole(h.shared_faces, h.shared_d_faces);

  // mask: Omega plus attached holes
  bullet.dom = dom;
  bullet.dom.name = dom.name + "-bullet";
  bool box_reached = false;
  for (int64_t l = 0; l < n; ++l) {
    int32_t k = comp.label[static_cast<size_t>(l)];
    if (k < 0) continue;
    const HoleInfo& h = bullet.holes[static_cast<size_t>(k)];
    if (h.cls == HoleClass::Attached) {
      bullet.dom.inside[static_cast<size_t>(l)] = 1;
      bullet.attached_cells += 1;
      if (h.touches_box) box_reached = true;
    }
  }
  bullet.boundary_type = box_reached ? "D ∪ ∂B" : "D";

  // blocked faces: open the Gamma-labeled ones, keep the D-labeled ones, and
  // block the D faces that turned internal by absorbing a hole
  for (size_t i = 0; i < lab.faces.size(); ++i) {
    const BFace& f = lab.faces[i];
    bool is_d = lab.dirichlet[i] != 0;
    if (f.kind == 2) {
      if (!is_d) bullet.dom.set_blocked(f.lo, f.axis, false);
      continue;
    }
    // inside/outside face of Omega; in the bullet both sides may be inside
    int64_t outside_cell = (f.kind == 0) ? f.hi : f.lo;
    if (outside_cell < 0) continue;
    if (!bullet.dom.inside[static_cast<size_t>(outside_cell)]) continue;
    if (is_d) bullet.dom.set_blocked(std::min(f.lo, f.hi), f.axis, true);
  }
  bullet.dom.finalize();
  return bullet;
}

BulletCheck verify_bullet(const VoxelDomain& dom, const BoundaryLabeling& lab,
                          const BulletDomain& bullet) {
  BulletCheck check;
  check.boundary_type = bullet.boundary_type;

  std::vector<BFace> bfaces = boundary_faces(bullet.dom);
  std::unordered_set<int64_t> on_bullet;
  for (const BFace& f : bfaces) on_bullet.insert(f.fid);

  // every bullet boundary face is D or box surface
  for (const BFace& f : bfaces) {
    bool box_face = (f.lo < 0 || f.hi < 0);
    auto it = lab.index.find(f.fid);
    bool is_d = it != lab.index.end() && lab.dirichlet[static_cast<size_t>(it->second)];
    if (!box_face && !is_d) check.discrepancies.push_back(f.fid);
  }
  // every D face still bounds the bullet
  for (size_t i = 0; i < lab.faces.size(); ++i)
    if (lab.dirichlet[i] && !on_bullet.count(lab.faces[i].fid))
      check.discrepancies.push_back(lab.faces[i].fid);

  // type is consistent with what the boundary actually contains
  bool has_box_face = false;
  for (const BFace& f : bfaces)
    if (f.lo < 0 || f.hi < 0) {
      has_box_face = true;
      break;
    }
  std::string recomputed = has_box_face ? "D ∪ ∂B" : "D";
  if (recomputed != bullet.boundary_type) check.discrepancies.push_back(-1);

  // scan-order independence
  BulletDomain redo = build_bullet(dom, lab, ScanOrder::Reverse);
  check.deterministic =
      redo.dom.inside == bullet.dom.inside && redo.dom.blocked == bullet.dom.blocked;

  check.pass = check.discrepancies.empty() && check.deterministic;
  return check;
}

StarDomain build_star(const VoxelDomain& dom, const std::vector<int64_t>& e_faces) {
  std::vector<BFace> bfaces = boundary_faces(dom);
  std::unordered_map<int64_t, const BFace*> on_boundary;
  for (const BFace& f : bfaces) on_boundary[f.fid] = &f;

  StarDomain star;
  star.dom = dom;
  star.dom.name = dom.name + "-star";
  std::unordered_set<int64_t> e_set;
  for (int64_t fid : e_faces) {
    auto it = on_boundary.find(fid);
    if (it == on_boundary.end())
      throw Error(ErrorKind::ENotOnBoundary,
                  "E face " + std::to_string(fid) + " is not a boundary or blocked face");
    e_set.insert(fid);
    const BFace& f = *it->second;
    if (f.kind == 2) {
      star.dom.set_blocked(std::min(f.lo, f.hi), f.axis, false);
      star.opened.push_back(fid);
    }
  }
  for (const BFace& f : bfaces)
    if (!e_set.count(f.fid)) star.xi_faces.push_back(f.fid);

  // E faces still on the boundary of the opened domain
  std::vector<BFace> after = boundary_faces(star.dom);
  for (const BFace& f : after)
    if (e_set.count(f.fid)) star.estar_faces.push_back(f.fid);
  star.dom.finalize();
  return star;
}

}  // namespace hardygeo
