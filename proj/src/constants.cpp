#include "hardygeo/constants.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>

#include "hardygeo/parallel.hpp"
#include "hardygeo/scenario.hpp"
#include "hardygeo/topology.hpp"

namespace hardygeo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

inline double sgn(double x) { return (x > 0.0) - (x < 0.0); }

// ---------------------------------------------------------------------------
// Matrix-free pencil W u = lambda L u on the inside cells. L is the p = 2
// gradient quadrature (interior couplings plus ghost pins at h/2), W a
// positive diagonal. Both are assembled from the same FaceCalculus that the
// norms use, so Rayleigh quotients of the pencil agree with norms() exactly.
struct Pencil {
  int64_t n = 0;
  double hcoef = 0.0;   // h^(d-2)
  double cell_w = 0.0;  // h^d
  double l_norm = 0.0;  // row-sum bound for ||L||_2
  std::vector<int32_t> off, adj;  // CSR adjacency over unblocked faces
  std::vector<double> diag;       // hcoef * (degree + 4 * pins)
  std::vector<double> w;          // numerator diagonal

  // y = (L - sigma W) x
  void apply(double sigma, const std::vector<double>& x, std::vector<double>& y) const {
    parallel_for(n, [&](int64_t k) {
      double s = 0.0;
      for (int32_t i = off[static_cast<size_t>(k)]; i < off[static_cast<size_t>(k) + 1]; ++i)
        s += x[static_cast<size_t>(adj[static_cast<size_t>(i)])];
      double v = diag[static_cast<size_t>(k)] * x[static_cast<size_t>(k)] - hcoef * s;
      if (sigma != 0.0) v -= sigma * w[static_cast<size_t>(k)] * x[static_cast<size_t>(k)];
      y[static_cast<size_t>(k)] = v;
    });
  }
};

Pencil build_pencil(const VoxelDomain& dom, const FaceCalculus& fc) {
  Pencil pc;
  pc.n = dom.inside_count();
  pc.hcoef = std::pow(dom.h, dom.d - 2);
  pc.cell_w = std::pow(dom.h, dom.d);
  std::vector<int32_t> deg(static_cast<size_t>(pc.n), 0);
  std::vector<int32_t> pins(static_cast<size_t>(pc.n), 0);
  for (const auto& ab : fc.int_cells) {
    deg[static_cast<size_t>(ab[0])]++;
    deg[static_cast<size_t>(ab[1])]++;
  }
  for (int32_t c : fc.pin_cell) pins[static_cast<size_t>(c)]++;
  pc.off.assign(static_cast<size_t>(pc.n) + 1, 0);
  for (int64_t k = 0; k < pc.n; ++k)
    pc.off[static_cast<size_t>(k) + 1] = pc.off[static_cast<size_t>(k)] + deg[static_cast<size_t>(k)];
  pc.adj.resize(static_cast<size_t>(pc.off[static_cast<size_t>(pc.n)]));
  std::vector<int32_t> cur(pc.off.begin(), pc.off.end() - 1);
  for (const auto& ab : fc.int_cells) {
    pc.adj[static_cast<size_t>(cur[static_cast<size_t>(ab[0])]++)] = ab[1];
    pc.adj[static_cast<size_t>(cur[static_cast<size_t>(ab[1])]++)] = ab[0];
  }
  pc.diag.resize(static_cast<size_t>(pc.n));
  for (int64_t k = 0; k < pc.n; ++k) {
    pc.diag[static_cast<size_t>(k)] =
        pc.hcoef * (deg[static_cast<size_t>(k)] + 4.0 * pins[static_cast<size_t>(k)]);
    pc.l_norm = std::max(pc.l_norm, pc.diag[static_cast<size_t>(k)] +
                                        pc.hcoef * deg[static_cast<size_t>(k)]);
  }
  return pc;
}

double det_dot(int64_t n, const std::vector<double>& a, const std::vector<double>& b) {
  return deterministic_sum(n, [&](int64_t i) {
    return a[static_cast<size_t>(i)] * b[static_cast<size_t>(i)];
  });
}

// Conjugate gradients for (L - sigma W) x = b, warm-started from x.
void cg_solve(const Pencil& pc, double sigma, const std::vector<double>& b,
              std::vector<double>& x, double tol, int cap) {
  int64_t n = pc.n;
  std::vector<double> r(static_cast<size_t>(n)), p(static_cast<size_t>(n)),
      ap(static_cast<size_t>(n));
  double nb = std::sqrt(det_dot(n, b, b));
  if (nb == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    return;
  }
  pc.apply(sigma, x, r);
  parallel_for(n, [&](int64_t i) {
    r[static_cast<size_t>(i)] = b[static_cast<size_t>(i)] - r[static_cast<size_t>(i)];
  });
  p = r;
  double rs = det_dot(n, r, r);
  for (int it = 0; it < cap && std::sqrt(rs) > tol * nb; ++it) {
    pc.apply(sigma, p, ap);
    double pap = det_dot(n, p, ap);
    if (!(pap > 0.0)) break;  // indefinite shift or breakdown
    double alpha = rs / pap;
    parallel_for(n, [&](int64_t i) {
      x[static_cast<size_t>(i)] += alpha * p[static_cast<size_t>(i)];
      r[static_cast<size_t>(i)] -= alpha * ap[static_cast<size_t>(i)];
    });
    double rs2 = det_dot(n, r, r);
    double beta = rs2 / rs;
    rs = rs2;
    parallel_for(n, [&](int64_t i) {
      p[static_cast<size_t>(i)] = r[static_cast<size_t>(i)] + beta * p[static_cast<size_t>(i)];
    });
  }
}

struct EigenResult {
  double c = 0.0;
  std::vector<double> v;
  int iterations = 0;
  double residual = 0.0;
};

// Inverse power iteration on the pencil: each step solves
// (L - shift W) y = W v, which converges to the extremal generalized
// eigenvalue (the largest of W u = lambda L u when shift = 0).
EigenResult pencil_top(const Pencil& pc, const SolveOpts& o, const char* what) {
  int64_t n = pc.n;
  std::vector<double> v(static_cast<size_t>(n), 1.0), y(static_cast<size_t>(n), 1.0);
  std::vector<double> wv(static_cast<size_t>(n)), ly(static_cast<size_t>(n));
  double rho = 0.0, res = kInf;
  int it = 0;
  while (it < o.max_iter) {
    ++it;
    parallel_for(n, [&](int64_t i) {
      wv[static_cast<size_t>(i)] = pc.w[static_cast<size_t>(i)] * v[static_cast<size_t>(i)];
    });
    cg_solve(pc, o.shift, wv, y, o.cg_tol, o.cg_cap);
    double m = 0.0;
    for (int64_t i = 0; i < n; ++i) m = std::max(m, std::abs(y[static_cast<size_t>(i)]));
    if (!(m > 0.0))
      throw Error(ErrorKind::NoConvergence, std::string(what) + ": iterate collapsed to zero");
    double inv = 1.0 / m;
    parallel_for(n, [&](int64_t i) { y[static_cast<size_t>(i)] *= inv; });
    pc.apply(0.0, y, ly);
    double num = deterministic_sum(n, [&](int64_t i) {
      return pc.w[static_cast<size_t>(i)] * y[static_cast<size_t>(i)] * y[static_cast<size_t>(i)];
    });
    double den = det_dot(n, y, ly);
    rho = num / den;
    double rn = std::sqrt(deterministic_sum(n, [&](int64_t i) {
      double t = pc.w[static_cast<size_t>(i)] * y[static_cast<size_t>(i)] -
                 rho * ly[static_cast<size_t>(i)];
      return t * t;
    }));
    double wn = std::sqrt(deterministic_sum(n, [&](int64_t i) {
      double t = pc.w[static_cast<size_t>(i)] * y[static_cast<size_t>(i)];
      return t * t;
    }));
    double yn = std::sqrt(det_dot(n, y, y));
    // backward error: residual against the perturbation scale of the pencil,
    // so the criterion stays meaningful when ||L|| amplifies roundoff
    res = rn / (wn + rho * pc.l_norm * yn);
    v = y;
    if (res <= o.tol) break;
  }
  if (res > o.tol) {
    char buf[192];
    std::snprintf(buf, sizeof(buf), "%s: eigensolve stalled after %d iterations (residual %.3e)",
                  what, it, res);
    throw Error(ErrorKind::NoConvergence, buf);
  }
  EigenResult er;
  er.c = rho;
  er.v = std::move(v);
  er.iterations = it;
  er.residual = res;
  return er;
}

struct AscentResult {
  double q = 0.0;
  std::vector<double> u;
  int steps = 0;
  double residual = 0.0;
};

// Maximizes  Q(u) = sum_k wdiag_k |u_k|^p / ||grad u||_p^p  by ascent along
// the stiffness-preconditioned gradient of log Q (a Sobolev gradient, so the
// rate does not degrade under refinement), with an adaptive step. Convergence:
// relative change of Q over the last `ascent_window` accepted steps below
// ascent_tol.
AscentResult quotient_ascent(const VoxelDomain& dom, const FaceCalculus& fc, const Pencil& pc,
                             const std::vector<double>& wdiag, double p,
                             std::vector<double> u, const SolveOpts& o, const char* what) {
  int64_t n = dom.inside_count();
  double h = dom.h;
  double hd = std::pow(h, dom.d);
  double hd1 = std::pow(h, dom.d - 1);
  size_t nint = fc.int_cells.size(), npin = fc.pin_cell.size();

  auto numerator = [&](const std::vector<double>& x) {
    return deterministic_sum(n, [&](int64_t i) {
      return wdiag[static_cast<size_t>(i)] * std::pow(std::abs(x[static_cast<size_t>(i)]), p);
    });
  };
  auto denominator = [&](const std::vector<double>& x) {
    double s = deterministic_sum(static_cast<int64_t>(nint), [&](int64_t i) {
      const auto& ab = fc.int_cells[static_cast<size_t>(i)];
      double g = (x[static_cast<size_t>(ab[1])] - x[static_cast<size_t>(ab[0])]) / h;
      return std::pow(std::abs(g), p) * hd;
    });
    s += deterministic_sum(static_cast<int64_t>(npin), [&](int64_t i) {
      double g = 2.0 * x[static_cast<size_t>(fc.pin_cell[static_cast<size_t>(i)])] / h;
      return std::pow(std::abs(g), p) * hd;
    });
    return s;
  };

  double m0 = 0.0;
  for (double x : u) m0 = std::max(m0, std::abs(x));
  if (!(m0 > 0.0)) throw Error(ErrorKind::NoConvergence, std::string(what) + ": zero start");
  for (double& x : u) x /= m0;

  double N = numerator(u), D = denominator(u);
  if (!(D > 0.0)) throw Error(ErrorKind::NoConvergence, std::string(what) + ": flat start");
  double q = N / D;
  double step = 0.5;
  std::vector<double> g(static_cast<size_t>(n)), ut(static_cast<size_t>(n));
  std::vector<double> dir(static_cast<size_t>(n), 0.0);  // warm start across steps
  std::vector<double> hist;
  hist.push_back(q);
  double res = kInf;
  int steps = 0;
  bool converged = false;
  size_t window = static_cast<size_t>(std::max(1, o.ascent_window));

  while (steps < o.ascent_cap) {
    ++steps;
    // gradient of log Q
    parallel_for(n, [&](int64_t i) {
      double x = u[static_cast<size_t>(i)];
      g[static_cast<size_t>(i)] =
          wdiag[static_cast<size_t>(i)] * p * std::pow(std::abs(x), p - 1.0) * sgn(x) / N;
    });
    for (size_t i = 0; i < nint; ++i) {
      const auto& ab = fc.int_cells[i];
      double gg = (u[static_cast<size_t>(ab[1])] - u[static_cast<size_t>(ab[0])]) / h;
      double t = p * std::pow(std::abs(gg), p - 1.0) * sgn(gg) * hd1 / D;
      g[static_cast<size_t>(ab[1])] -= t;
      g[static_cast<size_t>(ab[0])] += t;
    }
    for (size_t i = 0; i < npin; ++i) {
      int32_t c = fc.pin_cell[i];
      double gg = 2.0 * u[static_cast<size_t>(c)] / h;
      g[static_cast<size_t>(c)] -= p * std::pow(std::abs(gg), p - 1.0) * sgn(gg) * 2.0 * hd1 / D;
    }
    cg_solve(pc, 0.0, g, dir, 1e-8, o.cg_cap);
    double gmax = 0.0;
    for (double x : dir) gmax = std::max(gmax, std::abs(x));
    // Stationarity test: L scales like (p/D) times the Hessian of -log Q near
    // the maximizer, so dec*D/(2p) with dec = g.L^{-1}g predicts the remaining
    // attainable gain in log Q. The window test alone can miss convergence
    // when the whole ascent takes fewer accepted steps than the window.
    double dec = 0.0;
    for (int64_t i = 0; i < n; ++i)
      dec += g[static_cast<size_t>(i)] * dir[static_cast<size_t>(i)];
    double pred = std::abs(dec) * D / (2.0 * p);
    if (pred < 0.1 * o.ascent_tol) {
      converged = true;
      res = pred;
      break;
    }
    if (!(gmax > 0.0)) {
      converged = true;
      res = 0.0;
      break;
    }
    double sc = step / gmax;
    double mt = 0.0;
    for (int64_t i = 0; i < n; ++i) {
      double x = u[static_cast<size_t>(i)] + sc * dir[static_cast<size_t>(i)];
      ut[static_cast<size_t>(i)] = x;
      mt = std::max(mt, std::abs(x));
    }
    for (double& x : ut) x /= mt;
    double Nt = numerator(ut), Dt = denominator(ut);
    double qt = (Dt > 0.0) ? Nt / Dt : 0.0;
    if (qt > q) {
      u.swap(ut);
      N = Nt;
      D = Dt;
      q = qt;
      step *= 1.1;
      hist.push_back(q);
      if (hist.size() > window) {
        res = (q - hist[hist.size() - 1 - window]) / q;
        if (res < o.ascent_tol) {
          converged = true;
          break;
        }
      }
    } else {
      step *= 0.5;
      if (step < 1e-14) {
        // no admissible improvement left at floating-point resolution
        res = (hist.size() > window) ? (q - hist[hist.size() - 1 - window]) / q : 0.0;
        converged = res < o.ascent_tol;
        break;
      }
    }
  }
  if (!converged) {
    char buf[192];
    std::snprintf(buf, sizeof(buf), "%s: ascent not converged after %d steps (window change %.3e)",
                  what, steps, res);
    throw Error(ErrorKind::NoConvergence, buf);
  }
  AscentResult ar;
  ar.q = q;
  ar.u = std::move(u);
  ar.steps = steps;
  ar.residual = res;
  return ar;
}

GridFunction wrap_witness(const VoxelDomain& dom, std::vector<double> v) {
  GridFunction w;
  w.host = &dom;
  w.values = std::move(v);
  w.tag = Subspace::VanishingOnD;
  return w;
}

void require_p(double p) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw Error(ErrorKind::Config, "exponent p must be a finite number greater than 1");
}

// Signed depth of x into a region piece: positive inside (distance to the
// piece boundary along the cheapest axis), negative outside (minus the
// Euclidean distance to the piece).
double piece_depth(const Region::Piece& pc, const Vec& x, int d) {
  if (!pc.is_cylinder) {
    double inside = kInf, out2 = 0.0;
    for (int a = 0; a < d; ++a) {
      inside = std::min(inside, std::min(x[a] - pc.lo[a], pc.hi[a] - x[a]));
      double e = std::max(0.0, std::max(pc.lo[a] - x[a], x[a] - pc.hi[a]));
      out2 += e * e;
    }
    return (out2 > 0.0) ? -std::sqrt(out2) : inside;
  }
  int A = pc.axis;
  double rho2 = 0.0;
  for (int a = 0; a < d; ++a) {
    if (a == A) continue;
    double t = x[a] - pc.c[a];
    rho2 += t * t;
  }
  double dr = pc.r - std::sqrt(rho2);
  double da = std::min(x[A] - pc.lo[A], pc.hi[A] - x[A]);
  if (dr > 0.0 && da > 0.0) return std::min(dr, da);
  double e1 = std::max(0.0, -dr), e2 = std::max(0.0, -da);
  return -std::sqrt(e1 * e1 + e2 * e2);
}

double region_depth(const Region& r, const Vec& x, int d) {
  if (r.pieces.empty()) return r.complement ? kInf : -kInf;
  double s = -kInf;
  for (const auto& pc : r.pieces) s = std::max(s, piece_depth(pc, x, d));
  return r.complement ? -s : s;
}

// Ring distance from the domain into the surrounding box (face adjacency,
// cracks crossable: the cutoff is purely geometric), then a smoothstep that
// is exactly 1 at ring 0 and 0 from ring 3 on.
std::vector<double> box_cutoff(const VoxelDomain& box, const VoxelDomain& omega) {
  int64_t nc = box.ncells();
  std::vector<int32_t> lvl(static_cast<size_t>(nc), -1);
  std::queue<int64_t> bfs;
  for (int64_t l = 0; l < nc; ++l)
    if (omega.is_inside(l)) {
      lvl[static_cast<size_t>(l)] = 0;
      bfs.push(l);
    }
  while (!bfs.empty()) {
    int64_t l = bfs.front();
    bfs.pop();
    IVec c = box.unlin(l);
    for (int a = 0; a < box.d; ++a) {
      for (int s = -1; s <= 1; s += 2) {
        IVec m = c;
        m[a] += s;
        if (m[a] < 0 || m[a] >= box.dims[a]) continue;
        int64_t lm = box.lin(m);
        if (lvl[static_cast<size_t>(lm)] >= 0) continue;
        lvl[static_cast<size_t>(lm)] = lvl[static_cast<size_t>(l)] + 1;
        bfs.push(lm);
      }
    }
  }
  std::vector<double> cut(static_cast<size_t>(nc), 0.0);
  for (int64_t l = 0; l < nc; ++l) {
    int32_t lv = lvl[static_cast<size_t>(l)];
    if (lv >= 0) cut[static_cast<size_t>(l)] = smoothstep(1.0 - static_cast<double>(lv) / 3.0);
  }
  return cut;
}

}  // namespace

// ---------------------------------------------------------------------------

HardyReport hardy_constant(const VoxelDomain& dom, const BoundaryLabeling& lab, double p,
                           const SolveOpts& opts) {
  require_p(p);
  if (lab.d_empty())
    throw Error(ErrorKind::DEmpty, "Hardy constant requires a nonempty Dirichlet part");
  DistanceField dist = distance_to_D(dom, lab);
  FaceCalculus fc = face_calculus(dom, lab);
  Pencil pc = build_pencil(dom, fc);
  int64_t n = pc.n;
  pc.w.resize(static_cast<size_t>(n));
  for (int64_t k = 0; k < n; ++k) {
    double dk = dist.v[static_cast<size_t>(k)];
    pc.w[static_cast<size_t>(k)] = pc.cell_w / (dk * dk);
  }
  EigenResult eig = pencil_top(pc, opts, "hardy");

  HardyReport rep;
  rep.p = p;
  if (p == 2.0 && !opts.force_ascent) {
    rep.c = eig.c;
    rep.method = "eig-p2";
    rep.iterations = eig.iterations;
    rep.residual = eig.residual;
    rep.witness = wrap_witness(dom, std::move(eig.v));
    return rep;
  }
  std::vector<double> wdiag(static_cast<size_t>(n));
  for (int64_t k = 0; k < n; ++k)
    wdiag[static_cast<size_t>(k)] = pc.cell_w / std::pow(dist.v[static_cast<size_t>(k)], p);
  AscentResult asc = quotient_ascent(dom, fc, pc, wdiag, p, std::move(eig.v), opts, "hardy");
  rep.c = asc.q;
  rep.method = "ascent-p";
  rep.iterations = asc.steps;
  rep.residual = asc.residual;
  rep.witness = wrap_witness(dom, std::move(asc.u));
  return rep;
}

PoincareReport poincare_constant(const VoxelDomain& dom, const BoundaryLabeling& lab, double p,
                                 const SolveOpts& opts) {
  require_p(p);
  PoincareReport rep;
  rep.p = p;
  if (lab.d_empty()) {
    // constants are admissible with zero gradient
    rep.infinite = true;
    rep.constant = kInf;
    rep.method = "none";
    rep.witness = wrap_witness(dom, std::vector<double>(
                                        static_cast<size_t>(dom.inside_count()), 1.0));
    return rep;
  }
  FaceCalculus fc = face_calculus(dom, lab);
  Pencil pc = build_pencil(dom, fc);
  int64_t n = pc.n;
  pc.w.assign(static_cast<size_t>(n), pc.cell_w);
  EigenResult eig = pencil_top(pc, opts, "poincare");
  if (p == 2.0 && !opts.force_ascent) {
    rep.constant = eig.c;
    rep.method = "eig-p2";
    rep.iterations = eig.iterations;
    rep.residual = eig.residual;
    rep.witness = wrap_witness(dom, std::move(eig.v));
    return rep;
  }
  std::vector<double> wdiag(static_cast<size_t>(n), pc.cell_w);
  AscentResult asc = quotient_ascent(dom, fc, pc, wdiag, p, std::move(eig.v), opts, "poincare");
  rep.constant = asc.q;
  rep.method = "ascent-p";
  rep.iterations = asc.steps;
  rep.residual = asc.residual;
  rep.witness = wrap_witness(dom, std::move(asc.u));
  return rep;
}

BulletChainReport hardy_via_bullet(const VoxelDomain& dom, const BoundaryLabeling& lab,
                                   const std::vector<GluePatch>& patches, double p,
                                   uint64_t seed, int battery, const SolveOpts& opts) {
  require_p(p);
  if (lab.d_empty())
    throw Error(ErrorKind::DEmpty, "the chained bound requires a nonempty Dirichlet part");

  BulletChainReport rep;
  BulletDomain bu = build_bullet(dom, lab);
  rep.boundary_type = bu.boundary_type;
  rep.attached_cells = bu.attached_cells;

  DistanceField dd = distance_to_D(dom, lab);
  std::vector<Vec> bpts;
  for (const BFace& f : boundary_faces(bu.dom)) bpts.push_back(f.centroid);
  DistanceField db = distance_to_points(dom, bpts);
  int64_t n = dom.inside_count();
  double slack = kInf;
  for (int64_t k = 0; k < n; ++k)
    slack = std::min(slack, dd.v[static_cast<size_t>(k)] - db.v[static_cast<size_t>(k)]);
  rep.min_slack = slack;
  rep.dist_monotone = slack >= -1e-12;

  rep.direct = hardy_constant(dom, lab, p, opts);

  PartitionOfUnity pou = build_partition(dom, lab, patches);
  std::vector<double> cut = box_cutoff(*pou.box, dom);
  FaceCalculus fc_dom = face_calculus(dom, lab);
  FaceCalculus fc_box = face_calculus(*pou.box);

  Vec span = {0, 0, 0};
  double diam2 = 0.0;
  for (int a = 0; a < dom.d; ++a) {
    span[a] = static_cast<double>(dom.dims[a]) * dom.h;
    diam2 += span[a] * span[a];
  }
  double diam = std::sqrt(diam2);

  const double expo[3] = {0.6, 0.8, 1.0};
  Rng rng(seed * 0x9E3779B97F4A7C15ull + 0x2545F4914F6CDD1Dull);
  for (int i = 0; i < battery; ++i) {
    double a = expo[i % 3];
    Vec c = {0, 0, 0};
    for (int ax = 0; ax < dom.d; ++ax) c[ax] = dom.origin[ax] + rng.uniform() * span[ax];
    double sig = rng.uniform(0.15, 0.5) * diam;
    GridFunction u = make_function(dom, Subspace::VanishingOnD);
    for (int64_t k = 0; k < n; ++k) {
      Vec x = dom.center(dom.cells[static_cast<size_t>(k)]);
      u.values[static_cast<size_t>(k)] =
          std::exp(-dist2(x, c, dom.d) / (2.0 * sig * sig)) *
          std::pow(dd.v[static_cast<size_t>(k)], a);
    }
    u = enforce_D(u, lab, 2.0);
    GlueResult gl = glue_extension(u, pou, p);
    for (size_t l = 0; l < gl.eu.values.size(); ++l) gl.eu.values[l] *= cut[l];
    Norms nu = norms(u, p, fc_dom, &dd);
    Norms ne = norms(gl.eu, p, fc_box);
    double qn = std::pow(nu.weighted_lp, p);
    double qd = std::pow(ne.grad_lp, p);
    rep.quotients.push_back((qd > 0.0) ? qn / qd : 0.0);
  }
  rep.chained = 0.0;
  for (double q : rep.quotients) rep.chained = std::max(rep.chained, q);
  return rep;
}

LocalizedReport localized_hardy(const VoxelDomain& dom, const BoundaryLabeling& lab,
                                const Region& u_region, const Region& v_region, double p,
                                const SolveOpts& opts) {
  require_p(p);
  if (lab.d_empty())
    throw Error(ErrorKind::DEmpty, "localization requires a nonempty Dirichlet part");

  LocalizedReport rep;
  rep.d_in_u = true;
  rep.v_avoids_d = true;
  for (size_t i = 0; i < lab.faces.size(); ++i) {
    if (!lab.dirichlet[i]) continue;
    const Vec& x = lab.faces[i].centroid;
    if (!u_region.contains(x, dom.d)) rep.d_in_u = false;
    if (v_region.contains(x, dom.d)) rep.v_avoids_d = false;
  }
  int64_t n = dom.inside_count();
  rep.covered = true;
  for (int64_t k = 0; k < n && rep.covered; ++k) {
    Vec x = dom.center(dom.cells[static_cast<size_t>(k)]);
    if (!u_region.contains(x, dom.d) && !v_region.contains(x, dom.d)) rep.covered = false;
  }
  if (!rep.d_in_u)
    throw Error(ErrorKind::ConditionFailed, "cover condition fails: D is not contained in U");
  if (!rep.v_avoids_d)
    throw Error(ErrorKind::ConditionFailed, "cover condition fails: closure(V) meets D");
  if (!rep.covered)
    throw Error(ErrorKind::ConditionFailed, "cover condition fails: U and V do not cover the domain");

  // Two-weight partition from the positive parts of the signed depths,
  // eta_u = d_U^+ / (d_U^+ + d_V^+). Depths are physical lengths, so the
  // cutoffs and the gradient bound below converge under refinement instead
  // of steepening with the mesh.
  std::vector<double> eta_u(static_cast<size_t>(n)), eta_v(static_cast<size_t>(n));
  int64_t gap = -1;
  for (int64_t k = 0; k < n; ++k) {
    Vec x = dom.center(dom.cells[static_cast<size_t>(k)]);
    double pu = std::max(region_depth(u_region, x, dom.d), 0.0);
    double pv = std::max(region_depth(v_region, x, dom.d), 0.0);
    if (!(pu + pv > 0.0)) {
      if (gap < 0) gap = dom.cells[static_cast<size_t>(k)];
      continue;
    }
    double eu = (pu == kInf) ? 1.0 : (pv == kInf) ? 0.0 : pu / (pu + pv);
    eta_u[static_cast<size_t>(k)] = eu;
    eta_v[static_cast<size_t>(k)] = 1.0 - eu;
  }
  if (gap >= 0) {
    Vec x = dom.center(gap);
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "cover weights vanish at cell (%.6g, %.6g, %.6g); widen the U/V overlap",
                  x[0], x[1], x[2]);
    throw Error(ErrorKind::CoverGap, buf);
  }

  DistanceField dd = distance_to_D(dom, lab);
  double eps = kInf;
  for (int64_t k = 0; k < n; ++k)
    if (eta_v[static_cast<size_t>(k)] > 0.0)
      eps = std::min(eps, dd.v[static_cast<size_t>(k)]);
  rep.eps = eps;

  FaceCalculus fc_plain = face_calculus(dom);
  double gmax = 0.0;
  for (const auto& ab : fc_plain.int_cells)
    gmax = std::max(gmax, std::abs(eta_u[static_cast<size_t>(ab[1])] -
                                   eta_u[static_cast<size_t>(ab[0])]) / dom.h);
  rep.grad_bound = gmax;

  // Lambda = domain ∩ U; Dirichlet part = everything except original Gamma.
  VoxelDomain ldom = dom;
  for (int64_t k = 0; k < n; ++k) {
    int64_t l = dom.cells[static_cast<size_t>(k)];
    if (!u_region.contains(dom.center(l), dom.d)) ldom.inside[static_cast<size_t>(l)] = 0;
  }
  ldom.finalize();
  rep.lambda_cells = ldom.inside_count();
  if (rep.lambda_cells == 0)
    throw Error(ErrorKind::ConditionFailed, "U contains no cells of the domain");

  BoundaryLabeling llab;
  llab.faces = boundary_faces(ldom);
  llab.dirichlet.resize(llab.faces.size());
  for (size_t i = 0; i < llab.faces.size(); ++i) {
    const BFace& f = llab.faces[i];
    auto it = lab.index.find(f.fid);
    bool gamma = (it != lab.index.end()) && !lab.dirichlet[static_cast<size_t>(it->second)];
    llab.dirichlet[i] = gamma ? 0 : 1;
    if (llab.dirichlet[i]) llab.d_points.push_back(f.centroid);
    llab.index.emplace(f.fid, static_cast<int32_t>(i));
  }

  rep.c_lambda = hardy_constant(ldom, llab, p, opts).c;
  PoincareReport pr = poincare_constant(dom, lab, p, opts);
  rep.c_poincare = pr.constant;
  rep.c_direct = hardy_constant(dom, lab, p, opts).c;

  double cl = std::pow(rep.c_lambda, 1.0 / p);
  double cp = std::pow(rep.c_poincare, 1.0 / p);
  double cross = std::pow(2.0 * dom.d, 1.0 / p);  // cells enter face sums up to 2d times
  double t = cl * (1.0 + cross * gmax * cp);
  if (std::isfinite(eps) && eps > 0.0) t += cp / eps;
  rep.c_total = std::pow(t, p);
  return rep;
}

ConvergenceTable refine_and_compare(const ScenarioSpec& spec, int levels, RefineTask task,
                                    double p, const SolveOpts& opts) {
  if (levels < 1) throw Error(ErrorKind::Config, "need at least one refinement level");
  ConvergenceTable table;
  for (int i = 0; i < levels; ++i) {
    ScenarioSpec s = spec;
    s.resolution = spec.resolution * static_cast<double>(int64_t{1} << i);
    VoxelDomain dom = rasterize(s);
    BoundaryLabeling lb = label_boundary(dom, s);
    double v = (task == RefineTask::Hardy) ? hardy_constant(dom, lb, p, opts).c
                                           : poincare_constant(dom, lb, p, opts).constant;
    table.rows.push_back({s.resolution, v});
  }
  table.increasing = table.rows.size() > 1;
  table.decreasing = table.rows.size() > 1;
  for (size_t i = 1; i < table.rows.size(); ++i) {
    if (!(table.rows[i].value > table.rows[i - 1].value)) table.increasing = false;
    if (!(table.rows[i].value < table.rows[i - 1].value)) table.decreasing = false;
  }
  size_t m = table.rows.size();
  if (m >= 3) {
    double c1 = table.rows[m - 3].value, c2 = table.rows[m - 2].value,
           c3 = table.rows[m - 1].value;
    if (std::isfinite(c1) && std::isfinite(c2) && std::isfinite(c3) && c2 != c3) {
      double ratio = (c1 - c2) / (c2 - c3);
      if (ratio > 1.0) {
        table.q = std::log2(ratio);
        table.extrapolant = c3 + (c3 - c2) / (ratio - 1.0);
        table.has_extrapolant = true;
      }
    }
  }
  return table;
}

}  // namespace hardygeo
