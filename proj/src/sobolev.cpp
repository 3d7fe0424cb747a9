#include "hardygeo/sobolev.hpp"

#include <algorithm>
#include <cmath>

#include "hardygeo/parallel.hpp"
#include "hardygeo/scenario.hpp"

namespace hardygeo {

GridFunction make_function(const VoxelDomain& dom, Subspace tag) {
  GridFunction u;
  u.host = &dom;
  u.values.assign(dom.cells.size(), 0.0);
  u.tag = tag;
  return u;
}

GridFunction sample_function(const VoxelDomain& dom,
                             const std::function<double(const Vec&)>& f, Subspace tag) {
  GridFunction u = make_function(dom, tag);
  int64_t n = static_cast<int64_t>(dom.cells.size());
  parallel_for(n, [&](int64_t k) {
    u.values[static_cast<size_t>(k)] = f(dom.center(dom.cells[static_cast<size_t>(k)]));
  });
  return u;
}

int64_t total_face_ids(const VoxelDomain& dom) {
  return dom.face_base(2) + dom.faces_per_axis(2);
}

namespace {

bool face_is_d(const BoundaryLabeling* lab, int64_t fid) {
  if (!lab) return false;
  auto it = lab->index.find(fid);
  return it != lab->index.end() && lab->dirichlet[static_cast<size_t>(it->second)] != 0;
}

FaceCalculus build_calculus(const VoxelDomain& dom, const BoundaryLabeling* lab) {
  FaceCalculus fc;
  fc.host = &dom;
  for (int64_t l = 0; l < dom.ncells(); ++l) {
    if (!dom.is_inside(l)) continue;
    int32_t k = dom.compact[static_cast<size_t>(l)];
    IVec c = dom.unlin(l);
    for (int a = 0; a < dom.d; ++a) {
      IVec nb = c;
      nb[a] -= 1;
      if (!dom.is_inside(nb)) {  // lower boundary face
        int64_t fid = dom.lower_face(c, a);
        if (face_is_d(lab, fid)) {
          fc.pin_fid.push_back(fid);
          fc.pin_cell.push_back(k);
          fc.pin_orient.push_back(-1);
        }
      }
      nb = c;
      nb[a] += 1;
      if (dom.is_inside(nb)) {
        if (dom.is_blocked(l, a)) {  // crack face; may pin both sides
          int64_t fid = dom.upper_face(c, a);
          if (face_is_d(lab, fid)) {
            int32_t kn = dom.compact[static_cast<size_t>(dom.lin(nb))];
            fc.pin_fid.push_back(fid);
            fc.pin_cell.push_back(k);
            fc.pin_orient.push_back(+1);
            fc.pin_fid.push_back(fid);
            fc.pin_cell.push_back(kn);
            fc.pin_orient.push_back(-1);
          }
        } else {
          int32_t kn = dom.compact[static_cast<size_t>(dom.lin(nb))];
          fc.int_fid.push_back(dom.upper_face(c, a));
          fc.int_cells.push_back({k, kn});
        }
      } else {  // upper boundary face
        int64_t fid = dom.upper_face(c, a);
        if (face_is_d(lab, fid)) {
          fc.pin_fid.push_back(fid);
          fc.pin_cell.push_back(k);
          fc.pin_orient.push_back(+1);
        }
      }
    }
  }
  return fc;
}

}  // namespace

FaceCalculus face_calculus(const VoxelDomain& dom, const BoundaryLabeling& lab) {
  return build_calculus(dom, &lab);
}

FaceCalculus face_calculus(const VoxelDomain& dom) { return build_calculus(dom, nullptr); }

namespace {

GradientField gradient_impl(const GridFunction& u, const FaceCalculus& fc) {
  const VoxelDomain& dom = *u.host;
  GradientField g;
  g.host = &dom;
  g.v.assign(static_cast<size_t>(total_face_ids(dom)), 0.0);
  double h = dom.h;
  int64_t ni = static_cast<int64_t>(fc.int_fid.size());
  parallel_for(ni, [&](int64_t i) {
    auto [klo, khi] = fc.int_cells[static_cast<size_t>(i)];
    g.v[static_cast<size_t>(fc.int_fid[static_cast<size_t>(i)])] =
        (u.values[static_cast<size_t>(khi)] - u.values[static_cast<size_t>(klo)]) / h;
  });
  for (size_t i = 0; i < fc.pin_fid.size(); ++i) {
    double uc = u.values[static_cast<size_t>(fc.pin_cell[i])];
    double val = (fc.pin_orient[i] > 0) ? (0.0 - uc) / (h / 2.0) : (uc - 0.0) / (h / 2.0);
    int64_t fid = fc.pin_fid[i];
    int64_t lo, hi;
    dom.face_cells(fid, lo, hi);
    bool crack = lo >= 0 && hi >= 0 && dom.is_inside(lo) && dom.is_inside(hi);
    if (crack) {
      auto& pair = g.crack_d[fid];
      pair[(fc.pin_orient[i] > 0) ? 0 : 1] = val;  // orient +1 pins the lower cell
    } else {
      g.v[static_cast<size_t>(fid)] = val;
    }
  }
  double m = 0.0;
  for (double v : g.v) m = std::max(m, std::abs(v));
  for (auto& kv : g.crack_d) m = std::max({m, std::abs(kv.second[0]), std::abs(kv.second[1])});
  g.max_abs = m;
  return g;
}

// p-th powers of the cell and face sums, both weighted by h^d
void norm_powers(const GridFunction& u, double p, const FaceCalculus& fc, double& cell_pow,
                 double& grad_pow) {
  const VoxelDomain& dom = *u.host;
  double hd = std::pow(dom.h, dom.d);
  double h = dom.h;
  cell_pow = hd * deterministic_sum(static_cast<int64_t>(u.values.size()), [&](int64_t k) {
               return std::pow(std::abs(u.values[static_cast<size_t>(k)]), p);
             });
  double s_int = deterministic_sum(static_cast<int64_t>(fc.int_cells.size()), [&](int64_t i) {
    auto [klo, khi] = fc.int_cells[static_cast<size_t>(i)];
    double g = (u.values[static_cast<size_t>(khi)] - u.values[static_cast<size_t>(klo)]) / h;
    return std::pow(std::abs(g), p);
  });
  double s_pin = deterministic_sum(static_cast<int64_t>(fc.pin_cell.size()), [&](int64_t i) {
    double g = u.values[static_cast<size_t>(fc.pin_cell[static_cast<size_t>(i)])] / (h / 2.0);
    return std::pow(std::abs(g), p);
  });
  grad_pow = hd * (s_int + s_pin);
}

}  // namespace

GradientField gradient(const GridFunction& u, const BoundaryLabeling& lab) {
  return gradient_impl(u, face_calculus(*u.host, lab));
}

GradientField gradient(const GridFunction& u) {
  return gradient_impl(u, face_calculus(*u.host));
}

Norms norms(const GridFunction& u, double p, const FaceCalculus& fc,
            const DistanceField* dist) {
  if (!(p >= 1.0))
    throw Error(ErrorKind::Config, "norms: p must satisfy p >= 1");
  double cell_pow, grad_pow;
  norm_powers(u, p, fc, cell_pow, grad_pow);
  Norms out;
  out.lp = std::pow(cell_pow, 1.0 / p);
  out.grad_lp = std::pow(grad_pow, 1.0 / p);
  if (dist) {
    if (dist->infinite)
      throw Error(ErrorKind::DEmpty, "weighted norm needs a nonempty Dirichlet part");
    const VoxelDomain& dom = *u.host;
    double hd = std::pow(dom.h, dom.d);
    double w = hd * deterministic_sum(static_cast<int64_t>(u.values.size()), [&](int64_t k) {
                 return std::pow(std::abs(u.values[static_cast<size_t>(k)] /
                                          dist->v[static_cast<size_t>(k)]),
                                 p);
               });
    out.weighted_lp = std::pow(w, 1.0 / p);
  }
  return out;
}

Norms norms(const GridFunction& u, double p, const BoundaryLabeling& lab,
            const DistanceField* dist) {
  return norms(u, p, face_calculus(*u.host, lab), dist);
}

double w_norm(const GridFunction& u, double p, const FaceCalculus& fc) {
  double cell_pow, grad_pow;
  norm_powers(u, p, fc, cell_pow, grad_pow);
  return std::pow(cell_pow + grad_pow, 1.0 / p);
}

double trace_sup(const GridFunction& u, const BoundaryLabeling& lab) {
  if (u.tag == Subspace::VanishingOnD) return 0.0;  // trace = ghost value
  double m = 0.0;
  for (size_t i = 0; i < lab.faces.size(); ++i) {
    if (!lab.dirichlet[i]) continue;
    const BFace& f = lab.faces[i];
    if (f.lo >= 0) m = std::max(m, std::abs(u.at(f.lo)));
    if (f.hi >= 0) m = std::max(m, std::abs(u.at(f.hi)));
  }
  return m;
}

GridFunction enforce_D(const GridFunction& u, const BoundaryLabeling& lab, double width) {
  GridFunction out = u;
  out.tag = Subspace::VanishingOnD;
  if (lab.d_empty()) return out;
  width = std::max(width, 1.0);
  DistanceField dist = distance_to_D(*u.host, lab);
  int64_t n = static_cast<int64_t>(out.values.size());
  parallel_for(n, [&](int64_t k) {
    double t = (dist.v[static_cast<size_t>(k)] / u.host->h - 0.5) / (width - 0.5);
    out.values[static_cast<size_t>(k)] *= smoothstep(t);
  });
  return out;
}

GridFunction extend_by_zero(const GridFunction& u, const StarDomain& star) {
  const VoxelDomain& src = *u.host;
  const VoxelDomain& dst = star.dom;
  if (src.dims != dst.dims || src.d != dst.d || src.h != dst.h)
    throw Error(ErrorKind::Config, "extend_by_zero: star was built for a different grid");

  int64_t bad = 0;
  int64_t first = -1;
  double jump2 = 0.0;
  for (int64_t fid : star.opened) {
    int64_t lo, hi;
    src.face_cells(fid, lo, hi);
    double a = u.at(lo), b = u.at(hi);
    if (a != 0.0 || b != 0.0) {
      bad += 1;
      if (first < 0) first = (a != 0.0) ? lo : hi;
      double g = (b - a) / src.h;
      jump2 += g * g * std::pow(src.h, src.d);
    }
  }
  if (bad > 0)
    throw Error(ErrorKind::NonzeroNearE,
                "zero extension needs u = 0 beside each opened face; " + std::to_string(bad) +
                    " offending cell(s), first cell " + std::to_string(first) +
                    ", p=2 jump energy " + std::to_string(jump2));

  GridFunction out = make_function(dst, u.tag);
  int64_t n = static_cast<int64_t>(dst.cells.size());
  parallel_for(n, [&](int64_t k) {
    out.values[static_cast<size_t>(k)] = u.at(dst.cells[static_cast<size_t>(k)]);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Partition of unity and the glued extension.

namespace {

// Transition width per axis: a fixed fraction of the patch extent, so the
// cutoffs converge under refinement instead of steepening with the mesh. The
// support threshold stays at one cell (t > h), which is what the coverage
// check and the exact identity on the domain rely on.
double patch_width(const GluePatch& g, int a, int margin) {
  return (g.hi[a] - g.lo[a]) / (3.0 * margin);
}

double patch_bump(const GluePatch& g, const Vec& x, int d, double h, int margin) {
  double out = 1.0;
  for (int a = 0; a < d; ++a) {
    double t = std::min(x[a] - g.lo[a], g.hi[a] - x[a]);
    out *= smoothstep((t - h) / patch_width(g, a, margin));
  }
  return out;
}

double patch_cutoff(const GluePatch& g, const Vec& x, int d, double h, int margin) {
  double out = 1.0;
  for (int a = 0; a < d; ++a) {
    double t = std::min(x[a] - g.lo[a], g.hi[a] - x[a]);
    out *= smoothstep((t - h) / patch_width(g, a, margin) + 1.0);
  }
  return out;
}

}  // namespace

double PartitionOfUnity::weight_sum(int32_t k) const {
  int im = largest[static_cast<size_t>(k)];
  double s = 0.0;
  if (im != 0) s += far[static_cast<size_t>(k)];
  for (size_t j = 0; j < eta.size(); ++j)
    if (static_cast<int>(j) + 1 != im) s += eta[j][static_cast<size_t>(k)];
  double wm = (im == 0) ? far[static_cast<size_t>(k)]
                        : eta[static_cast<size_t>(im - 1)][static_cast<size_t>(k)];
  return s + wm;
}

PartitionOfUnity build_partition(const VoxelDomain& dom, const BoundaryLabeling& lab,
                                 const std::vector<GluePatch>& patches, int margin) {
  PartitionOfUnity pou;
  pou.omega = &dom;
  pou.patches = patches;
  pou.margin = std::max(margin, 1);

  pou.box = std::make_shared<VoxelDomain>(dom);
  pou.box->inside.assign(static_cast<size_t>(dom.ncells()), 1);
  pou.box->name = dom.name + "-box";
  pou.box->finalize();

  size_t ni = dom.cells.size();
  pou.far.assign(ni, 1.0);
  pou.largest.assign(ni, 0);
  if (patches.empty()) return pou;  // far field alone covers everything

  std::vector<Vec> gamma;
  for (size_t i = 0; i < lab.faces.size(); ++i)
    if (!lab.dirichlet[i]) gamma.push_back(lab.faces[i].centroid);
  DistanceField dg = distance_to_points(dom, gamma);

  double far_width = std::numeric_limits<double>::infinity();
  for (const GluePatch& g : patches)
    for (int a = 0; a < dom.d; ++a)
      far_width = std::min(far_width, patch_width(g, a, pou.margin));

  size_t np = patches.size();
  pou.eta.assign(np, std::vector<double>(ni, 0.0));
  pou.zeta.assign(np, std::vector<double>(static_cast<size_t>(dom.ncells()), 0.0));
  for (size_t j = 0; j < np; ++j) {
    parallel_for(static_cast<int64_t>(ni), [&](int64_t k) {
      Vec x = dom.center(dom.cells[static_cast<size_t>(k)]);
      pou.eta[j][static_cast<size_t>(k)] = patch_bump(patches[j], x, dom.d, dom.h, pou.margin);
    });
    parallel_for(dom.ncells(), [&](int64_t l) {
      pou.zeta[j][static_cast<size_t>(l)] =
          patch_cutoff(patches[j], dom.center(l), dom.d, dom.h, pou.margin);
    });
  }

  // normalize per cell; the largest weight is set to 1 minus the rest so the
  // canonical sum is exactly 1
  int64_t gaps = 0;
  int64_t first_gap = -1;
  for (size_t k = 0; k < ni; ++k) {
    double far_raw = dg.infinite ? 1.0 : smoothstep((dg.v[k] - dom.h) / far_width);
    double tot = far_raw;
    for (size_t j = 0; j < np; ++j) tot += pou.eta[j][k];
    if (tot <= 0.0) {
      gaps += 1;
      if (first_gap < 0) first_gap = dom.cells[k];
      continue;
    }
    pou.far[k] = far_raw / tot;
    int im = 0;
    double wm = pou.far[k];
    for (size_t j = 0; j < np; ++j) {
      pou.eta[j][k] /= tot;
      if (pou.eta[j][k] > wm) {
        wm = pou.eta[j][k];
        im = static_cast<int>(j) + 1;
      }
    }
    double rest = (im == 0) ? 0.0 : pou.far[k];
    for (size_t j = 0; j < np; ++j)
      if (static_cast<int>(j) + 1 != im) rest += pou.eta[j][k];
    if (im == 0)
      pou.far[k] = 1.0 - rest;
    else
      pou.eta[static_cast<size_t>(im - 1)][k] = 1.0 - rest;
    pou.largest[k] = static_cast<int8_t>(im);
  }
  if (gaps > 0) {
    Vec x = dom.center(first_gap);
    throw Error(ErrorKind::CoverGap,
                "partition of unity leaves " + std::to_string(gaps) +
                    " cell(s) uncovered, first near (" + std::to_string(x[0]) + ", " +
                    std::to_string(x[1]) + ", " + std::to_string(x[2]) + ")");
  }
  return pou;
}

namespace {

// per-column even reflection; returns target cell -> eta_j*u at the mirror
void reflect_patch(const GridFunction& u, const PartitionOfUnity& pou, size_t j,
                   std::unordered_map<int64_t, double>& fill) {
  const VoxelDomain& dom = *pou.omega;
  const GluePatch& g = pou.patches[j];
  int A = g.axis;

  IVec ilo = {0, 0, 0}, ihi = {0, 0, 0};
  for (int a = 0; a < 3; ++a) {
    if (a < dom.d) {
      double lo = (g.lo[a] - dom.origin[a]) / dom.h - 0.5;
      double hi = (g.hi[a] - dom.origin[a]) / dom.h - 0.5;
      ilo[a] = std::max<int64_t>(0, static_cast<int64_t>(std::ceil(lo - 1e-9)));
      ihi[a] = std::min<int64_t>(dom.dims[a] - 1, static_cast<int64_t>(std::floor(hi + 1e-9)));
    } else {
      ilo[a] = ihi[a] = 0;
    }
  }
  if (ilo[A] > ihi[A]) return;

  int t1 = (A == 0) ? 1 : 0;           // transverse axes
  int t2 = (A == 2) ? 1 : 2;
  IVec c;
  for (c[t2] = ilo[t2]; c[t2] <= ihi[t2]; ++c[t2]) {
    for (c[t1] = ilo[t1]; c[t1] <= ihi[t1]; ++c[t1]) {
      // locate the single run of inside cells along the column
      int64_t run_lo = -1, run_hi = -1;
      for (c[A] = ilo[A]; c[A] <= ihi[A]; ++c[A]) {
        if (!dom.is_inside(dom.lin(c))) continue;
        if (run_lo < 0) {
          run_lo = run_hi = c[A];
        } else if (c[A] == run_hi + 1) {
          run_hi = c[A];
        } else {
          throw Error(ErrorKind::PatchNotReflectable,
                      "patch " + std::to_string(j) + ": column has a split cell run");
        }
      }
      if (run_lo < 0) continue;

      int64_t steps = (g.dir > 0) ? ihi[A] - run_hi : run_lo - ilo[A];
      for (int64_t k = 1; k <= steps; ++k) {
        IVec tc = c, sc = c;
        tc[A] = (g.dir > 0) ? run_hi + k : run_lo - k;
        sc[A] = (g.dir > 0) ? run_hi + 1 - k : run_lo - 1 + k;
        if (k >= 2) {
          // face between this source and the previous one
          int64_t lower = (g.dir > 0) ? sc[A] : sc[A] - 1;
          IVec lc = sc;
          lc[A] = lower;
          IVec uc = lc;
          uc[A] += 1;
          if (dom.is_inside(lc) && dom.is_inside(uc) && dom.is_blocked(dom.lin(lc), A))
            throw Error(ErrorKind::PatchNotReflectable,
                        "patch " + std::to_string(j) + ": reflection crosses a crack face");
        }
        double val = 0.0;
        if (sc[A] >= 0 && sc[A] < dom.dims[A] && dom.is_inside(dom.lin(sc))) {
          int32_t ks = dom.compact[static_cast<size_t>(dom.lin(sc))];
          val = pou.eta[j][static_cast<size_t>(ks)] * u.values[static_cast<size_t>(ks)];
        }
        fill[dom.lin(tc)] = val;
      }
    }
  }
}

}  // namespace

GlueResult glue_extension(const GridFunction& u, const PartitionOfUnity& pou, double p) {
  const VoxelDomain& dom = *pou.omega;
  if (u.host->dims != dom.dims || u.host->h != dom.h || u.host->origin != dom.origin)
    throw Error(ErrorKind::Config, "glue_extension: function lives on a different grid");

  size_t np = pou.patches.size();
  std::vector<std::unordered_map<int64_t, double>> fill(np);
  for (size_t j = 0; j < np; ++j) reflect_patch(u, pou, j, fill[j]);

  GlueResult out;
  out.eu = make_function(*pou.box, Subspace::Full);
  int64_t n = dom.ncells();
  for (int64_t l = 0; l < n; ++l) {
    double val = 0.0;
    if (dom.is_inside(l)) {
      int32_t k = dom.compact[static_cast<size_t>(l)];
      // sum the cutoff-scaled weights in canonical order (largest last);
      // zeta_j = 1 on supp(eta_j), so this reproduces weight_sum == 1 and
      // E(u) = u exactly on the domain
      int im = pou.largest[static_cast<size_t>(k)];
      double s = 0.0;
      if (im != 0) s += pou.far[static_cast<size_t>(k)];
      for (size_t j = 0; j < np; ++j)
        if (static_cast<int>(j) + 1 != im)
          s += pou.zeta[j][static_cast<size_t>(l)] * pou.eta[j][static_cast<size_t>(k)];
      double wm = (im == 0) ? pou.far[static_cast<size_t>(k)]
                            : pou.zeta[static_cast<size_t>(im - 1)][static_cast<size_t>(l)] *
                                  pou.eta[static_cast<size_t>(im - 1)][static_cast<size_t>(k)];
      val = u.values[static_cast<size_t>(k)] * (s + wm);
    } else {
      for (size_t j = 0; j < np; ++j) {
        auto it = fill[j].find(l);
        if (it != fill[j].end())
          val += pou.zeta[j][static_cast<size_t>(l)] * it->second;
      }
    }
    out.eu.values[static_cast<size_t>(l)] = val;
  }

  double nb = w_norm(out.eu, p, face_calculus(*pou.box));
  double nu = w_norm(u, p, face_calculus(*u.host));
  out.ratio = (nu > 0.0) ? nb / nu : 0.0;
  return out;
}

}  // namespace hardygeo
