#include "hardygeo/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hardygeo/parallel.hpp"

namespace hardygeo {

double PointCloud::diameter() const {
  size_t n = points.size();
  if (n == 0) return 0.0;
  // exact max pairwise distance for moderate clouds, strided beyond
  size_t stride = std::max<size_t>(1, n / 2048);
  double best = 0.0;
  for (size_t i = 0; i < n; i += stride)
    for (size_t j = i + 1; j < n; ++j)
      best = std::max(best, dist2(points[i], points[j], d));
  return std::sqrt(best);
}

PointCloud cloud_segment(Vec a, Vec b, int n, int d) {
  PointCloud c;
  c.d = d;
  double len = dist(a, b, d);
  for (int i = 0; i < n; ++i) {
    double t = (n > 1) ? static_cast<double>(i) / (n - 1) : 0.5;
    Vec p = {0, 0, 0};
    for (int k = 0; k < d; ++k) p[k] = a[k] + t * (b[k] - a[k]);
    c.points.push_back(p);
    c.mass.push_back(len / n);
  }
  c.sep = (n > 1) ? len / (n - 1) : len;
  return c;
}

PointCloud cloud_circle(Vec ctr, double radius, int n) {
  PointCloud c;
  c.d = 2;
  const double two_pi = 6.283185307179586476925287;
  for (int i = 0; i < n; ++i) {
    double a = two_pi * i / n;
    c.points.push_back(vec(ctr[0] + radius * std::cos(a), ctr[1] + radius * std::sin(a)));
    c.mass.push_back(two_pi * radius / n);
  }
  c.sep = two_pi * radius / n;
  return c;
}

PointCloud cloud_square_boundary(Vec lo, double side, int n_per_side) {
  PointCloud c;
  c.d = 2;
  double step = side / n_per_side;
  for (int i = 0; i < n_per_side; ++i) {
    double t = i * step;
    c.points.push_back(vec(lo[0] + t, lo[1]));
    c.points.push_back(vec(lo[0] + side, lo[1] + t));
    c.points.push_back(vec(lo[0] + side - t, lo[1] + side));
    c.points.push_back(vec(lo[0], lo[1] + side - t));
    for (int k = 0; k < 4; ++k) c.mass.push_back(step);
  }
  c.sep = step;
  return c;
}

PointCloud cloud_square_area(Vec lo, double side, int n_per_axis) {
  PointCloud c;
  c.d = 2;
  double step = side / n_per_axis;
  for (int j = 0; j < n_per_axis; ++j)
    for (int i = 0; i < n_per_axis; ++i) {
      c.points.push_back(vec(lo[0] + (i + 0.5) * step, lo[1] + (j + 0.5) * step));
      c.mass.push_back(step * step);
    }
  c.sep = step;
  return c;
}

PointCloud cloud_point(Vec p, int d, double sep) {
  PointCloud c;
  c.d = d;
  c.points.push_back(p);
  c.mass.push_back(1.0);
  c.sep = sep;
  return c;
}

PointCloud cloud_empty(int d) {
  PointCloud c;
  c.d = d;
  c.empty_flag = true;
  c.sep = 1.0;
  return c;
}

PointCloud cloud_from_labeling(const VoxelDomain& dom, const BoundaryLabeling& lab) {
  PointCloud c;
  c.d = dom.d;
  double face_mass = std::pow(dom.h, dom.d - 1);
  for (const Vec& p : lab.d_points) {
    c.points.push_back(p);
    c.mass.push_back(face_mass);
  }
  c.sep = dom.h;
  c.empty_flag = c.points.empty();
  return c;
}

// ---------------------------------------------------------------------------
// Upper bound: greedy cover. From the first uncovered point q, the ball is
// centered at the farthest still-uncovered cloud point within distance r of q
// (so one ball spans up to 2r of a curve instead of r).

static void greedy_cover(const std::vector<Vec>& pts, const std::vector<int32_t>& subset,
                         int d, double r, std::vector<int32_t>& centers_out,
                         std::vector<std::vector<int32_t>>& members_out) {
  size_t n = subset.size();
  std::vector<uint8_t> covered(n, 0);
  centers_out.clear();
  members_out.clear();
  for (size_t i = 0; i < n; ++i) {
    if (covered[i]) continue;
    const Vec& q = pts[static_cast<size_t>(subset[i])];
    size_t best = i;
    double best_d2 = 0.0;
    for (size_t j = i; j < n; ++j) {
      if (covered[j]) continue;
      double d2 = dist2(q, pts[static_cast<size_t>(subset[j])], d);
      if (d2 <= r * r && d2 > best_d2) {
        best_d2 = d2;
        best = j;
      }
    }
    const Vec& ctr = pts[static_cast<size_t>(subset[best])];
    centers_out.push_back(subset[best]);
    members_out.emplace_back();
    for (size_t j = 0; j < n; ++j) {
      if (covered[j]) continue;
      if (dist2(ctr, pts[static_cast<size_t>(subset[j])], d) <= r * r) {
        covered[j] = 1;
        members_out.back().push_back(subset[j]);
      }
    }
  }
}

ContentEstimate content_upper(const PointCloud& cloud, double l, double r_min, double r_max) {
  if (l <= 0) throw Error(ErrorKind::BadDimension, "content dimension l must be positive");
  ContentEstimate est;
  est.l = l;
  if (cloud.empty_flag || cloud.points.empty()) return est;

  double diam = cloud.diameter();
  if (r_max <= 0) r_max = std::max(diam, cloud.sep);
  if (r_min <= 0) r_min = std::max(cloud.sep, r_max / 4096.0);
  r_min = std::min(r_min, r_max);

  std::vector<int32_t> all(cloud.points.size());
  for (size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int32_t>(i);

  double best_sum = std::numeric_limits<double>::infinity();
  BallCover best_cover;

  for (double r = r_max; r >= r_min * (1.0 - 1e-12); r *= 0.5) {
    std::vector<int32_t> centers;
    std::vector<std::vector<int32_t>> members;
    greedy_cover(cloud.points, all, cloud.d, r, centers, members);

    // cover at one radius, then mixed-radius passes: split any ball whose
    // members are covered more cheaply at half the radius
    std::vector<double> radii(centers.size(), r);
    bool improved = true;
    while (improved) {
      improved = false;
      std::vector<int32_t> nc;
      std::vector<std::vector<int32_t>> nm;
      std::vector<double> nr;
      for (size_t b = 0; b < centers.size(); ++b) {
        double rb = radii[b];
        bool split = false;
        if (rb * 0.5 >= cloud.sep && members[b].size() > 1) {
          std::vector<int32_t> sc;
          std::vector<std::vector<int32_t>> sm;
          greedy_cover(cloud.points, members[b], cloud.d, rb * 0.5, sc, sm);
          double half_cost = static_cast<double>(sc.size()) * std::pow(rb * 0.5, l);
          if (half_cost < std::pow(rb, l) * (1.0 - 1e-12)) {
            for (size_t k = 0; k < sc.size(); ++k) {
              nc.push_back(sc[k]);
              nm.push_back(sm[k]);
              nr.push_back(rb * 0.5);
            }
            split = true;
            improved = true;
          }
        }
        if (!split) {
          nc.push_back(centers[b]);
          nm.push_back(members[b]);
          nr.push_back(rb);
        }
      }
      centers.swap(nc);
      members.swap(nm);
      radii.swap(nr);
    }

    double sum = 0.0;
    for (double rb : radii) sum += std::pow(rb, l);
    if (sum < best_sum) {
      best_sum = sum;
      best_cover.centers.clear();
      best_cover.radii = radii;
      for (int32_t ci : centers) best_cover.centers.push_back(cloud.points[static_cast<size_t>(ci)]);
    }
    if (r_max == r_min) break;
  }

  est.upper = best_sum;
  est.cover = best_cover;
  for (double rb : best_cover.radii)
    est.slack += std::pow(rb + cloud.sep, l) - std::pow(rb, l);
  return est;
}

// ---------------------------------------------------------------------------
// Lower bound: mass distribution. C = max mu(B(x,r))/r^l over cloud centers
// and a dyadic radius ladder floored at floor_mult*sep.

static double family_max_ratio(const PointCloud& cloud, double l, double floor_mult) {
  double diam = std::max(cloud.diameter(), cloud.sep);
  double r_lo = floor_mult * cloud.sep;
  double r_hi = std::max(diam, r_lo);
  double worst = 0.0;
  size_t n = cloud.points.size();
  // cap the center family for large clouds; stride keeps it deterministic
  size_t stride = std::max<size_t>(1, n / 512);
  for (double r = r_hi; r >= r_lo * (1.0 - 1e-12); r *= 0.5) {
    double r2 = r * r;
    double worst_r = 0.0;
    for (size_t i = 0; i < n; i += stride) {
      const Vec& x = cloud.points[i];
      double mu = 0.0;
      for (size_t j = 0; j < n; ++j)
        if (dist2(x, cloud.points[j], cloud.d) <= r2) mu += cloud.mass[j];
      worst_r = std::max(worst_r, mu);
    }
    worst = std::max(worst, worst_r / std::pow(r, l));
    if (r_hi == r_lo) break;
  }
  return worst;
}

ContentEstimate content_lower(const PointCloud& cloud, double l) {
  if (l <= 0) throw Error(ErrorKind::BadDimension, "content dimension l must be positive");
  ContentEstimate est;
  est.l = l;
  if (cloud.empty_flag || cloud.points.empty()) return est;
  est.family_max = family_max_ratio(cloud, l, 8.0);
  if (est.family_max > 0) est.lower = cloud.total_mass() / est.family_max;
  est.upper = std::numeric_limits<double>::infinity();
  return est;
}

// ---------------------------------------------------------------------------

static PointCloud restrict_cloud(const PointCloud& cloud, const Vec& x, double r) {
  PointCloud sub;
  sub.d = cloud.d;
  sub.sep = cloud.sep;
  double r2 = r * r;
  for (size_t i = 0; i < cloud.points.size(); ++i)
    if (dist2(cloud.points[i], x, cloud.d) <= r2) {
      sub.points.push_back(cloud.points[i]);
      sub.mass.push_back(cloud.mass[i]);
    }
  sub.empty_flag = sub.points.empty();
  return sub;
}

ThicknessReport check_thickness(const PointCloud& cloud, double l, double R, int n_samples,
                                double gamma_req, uint64_t seed) {
  if (l <= 0) throw Error(ErrorKind::BadDimension, "l must be positive");
  if (R <= 4.0 * cloud.sep)
    throw Error(ErrorKind::ScaleTooFine, "scale cap R must exceed 4*sep");
  ThicknessReport rep;
  rep.l = l;
  rep.R = R;
  rep.gamma_req = gamma_req;
  if (cloud.empty_flag || cloud.points.empty()) {
    rep.gamma_min = 0.0;
    rep.pass = false;
    return rep;
  }
  Rng rng(seed);
  rep.gamma_min = std::numeric_limits<double>::infinity();
  for (int s = 0; s < n_samples; ++s) {
    ThicknessSample ts;
    ts.x = cloud.points[static_cast<size_t>(rng.index(static_cast<int64_t>(cloud.points.size())))];
    ts.r = rng.log_uniform(4.0 * cloud.sep, R);
    PointCloud sub = restrict_cloud(cloud, ts.x, ts.r);
    ContentEstimate lo = content_lower(sub, l);
    ts.ratio = lo.lower / std::pow(ts.r, l);
    rep.samples.push_back(ts);
    rep.gamma_min = std::min(rep.gamma_min, ts.ratio);
  }
  rep.pass = rep.gamma_min >= gamma_req;
  return rep;
}

LSetReport check_l_set(const PointCloud& cloud, double l, int n_samples, uint64_t seed) {
  if (l <= 0) throw Error(ErrorKind::BadDimension, "l must be positive");
  double r_lo = 16.0 * cloud.sep;
  double r_hi = std::min(1.0, std::max(cloud.diameter(), r_lo * 2.0));
  if (r_hi <= r_lo) throw Error(ErrorKind::ScaleTooFine, "cloud too coarse for radii in ]0,1]");
  LSetReport rep;
  rep.l = l;
  if (cloud.empty_flag || cloud.points.empty()) return rep;
  Rng rng(seed);
  rep.c0 = std::numeric_limits<double>::infinity();
  for (int s = 0; s < n_samples; ++s) {
    ThicknessSample ts;
    ts.x = cloud.points[static_cast<size_t>(rng.index(static_cast<int64_t>(cloud.points.size())))];
    ts.r = rng.log_uniform(r_lo, r_hi);
    PointCloud sub = restrict_cloud(cloud, ts.x, ts.r);
    double mu = sub.total_mass();
    ts.ratio = mu / std::pow(ts.r, l);
    rep.samples.push_back(ts);
    rep.c0 = std::min(rep.c0, ts.ratio);
    rep.c1 = std::max(rep.c1, ts.ratio);
  }
  rep.pass = rep.c0 > 0.05 * rep.c1 && rep.c1 < std::numeric_limits<double>::infinity();
  return rep;
}

PorosityReport check_porosity(const PointCloud& cloud, const std::vector<double>& kappas,
                              int n_balls, uint64_t seed, double r_max) {
  PorosityReport rep;
  rep.kappa_grid = kappas;
  std::sort(rep.kappa_grid.begin(), rep.kappa_grid.end(), std::greater<double>());
  if (cloud.empty_flag || cloud.points.empty()) return rep;
  Rng rng(seed);
  double r_lo = std::min(8.0 * cloud.sep, 0.5 * r_max);
  rep.kappa_best = 1.0;
  for (int s = 0; s < n_balls; ++s) {
    PorosityBall pb;
    pb.x = cloud.points[static_cast<size_t>(rng.index(static_cast<int64_t>(cloud.points.size())))];
    pb.r = rng.log_uniform(r_lo, r_max);
    pb.kappa = 0.0;
    for (double kappa : rep.kappa_grid) {
      // candidate holes y on a lattice in B(x, (1-kappa) r); the hole must
      // clear the continuum set, hence the +sep allowance
      double reach = (1.0 - kappa) * pb.r;
      double need = kappa * pb.r + cloud.sep;
      const int K = 6;
      bool found = false;
      int kz_max = (cloud.d > 2) ? K : 0;
      int ky_max = (cloud.d > 1) ? K : 0;
      for (int kz = -kz_max; kz <= kz_max && !found; ++kz)
        for (int ky = -ky_max; ky <= ky_max && !found; ++ky)
          for (int kx = -K; kx <= K && !found; ++kx) {
            Vec y = pb.x;
            y[0] += reach * kx / K;
            if (cloud.d > 1) y[1] += reach * ky / K;
            if (cloud.d > 2) y[2] += reach * kz / K;
            if (dist(y, pb.x, cloud.d) > reach) continue;
            double nearest2 = std::numeric_limits<double>::infinity();
            for (const Vec& p : cloud.points) nearest2 = std::min(nearest2, dist2(y, p, cloud.d));
            if (nearest2 >= need * need) found = true;
          }
      if (found) {
        pb.kappa = kappa;
        break;
      }
    }
    if (pb.kappa == 0.0) rep.failures.push_back(rep.balls.size());
    rep.balls.push_back(pb);
    rep.kappa_best = std::min(rep.kappa_best, pb.kappa);
  }
  if (rep.balls.empty()) rep.kappa_best = 0.0;
  return rep;
}

// ---------------------------------------------------------------------------

static double aikawa_quad(const Vec& blo, const Vec& bhi, const PointCloud& F, double t,
                          const Vec& x, double r, int m) {
  int d = F.d;
  Vec qlo = x, qhi = x;
  for (int a = 0; a < d; ++a) {
    qlo[a] = std::max(x[a] - r, blo[a]);
    qhi[a] = std::min(x[a] + r, bhi[a]);
  }
  int64_t mx = m, my = (d > 1) ? m : 1, mz = (d > 2) ? m : 1;
  double cellvol = 1.0;
  Vec step = {0, 0, 0};
  for (int a = 0; a < d; ++a) {
    step[a] = (qhi[a] - qlo[a]) / m;
    cellvol *= step[a];
  }
  if (cellvol <= 0) return 0.0;
  int64_t total = mx * my * mz;
  double r2 = r * r;
  return deterministic_sum(total, [&](int64_t idx) {
    int64_t ix = idx % mx;
    int64_t iy = (idx / mx) % my;
    int64_t iz = idx / (mx * my);
    Vec q = {0, 0, 0};
    q[0] = qlo[0] + (ix + 0.5) * step[0];
    if (d > 1) q[1] = qlo[1] + (iy + 0.5) * step[1];
    if (d > 2) q[2] = qlo[2] + (iz + 0.5) * step[2];
    if (dist2(q, x, d) > r2) return 0.0;
    double nearest2 = std::numeric_limits<double>::infinity();
    for (const Vec& p : F.points) nearest2 = std::min(nearest2, dist2(q, p, d));
    double dd = std::sqrt(nearest2);
    if (dd <= 0) dd = 1e-300;
    return std::pow(dd, t - d) * cellvol;
  });
}

AikawaResult aikawa_integral(Vec box_lo, Vec box_hi, const PointCloud& F, double t, Vec x,
                             double r, int m_quad) {
  if (t <= 0)
    throw Error(ErrorKind::QuadratureUnderflow, "exponent t must be positive");
  if (F.empty_flag || F.points.empty())
    throw Error(ErrorKind::Config, "aikawa integral needs a nonempty set");
  int d = F.d;
  if (m_quad <= 0) m_quad = (d == 1) ? 4096 : (d == 2) ? 256 : 48;
  int m0 = std::max(8, m_quad / 4);
  double v0 = aikawa_quad(box_lo, box_hi, F, t, x, r, m0);
  double v1 = aikawa_quad(box_lo, box_hi, F, t, x, r, m0 * 2);
  double v2 = aikawa_quad(box_lo, box_hi, F, t, x, r, std::max(m_quad, m0 * 4));
  if (v1 >= 2.0 * v0 && v2 >= 2.0 * v1)
    throw Error(ErrorKind::QuadratureUnderflow,
                "quadrature diverges under refinement (exponent below the set dimension)");
  AikawaResult res;
  res.value = v2;
  res.ratio = v2 / std::pow(r, t);
  return res;
}

AikawaSweep aikawa_sweep(Vec box_lo, Vec box_hi, const PointCloud& F,
                         const std::vector<double>& ts, Vec x, double r_max, int n_radii,
                         int m_quad) {
  AikawaSweep sweep;
  sweep.t_estimate = std::numeric_limits<double>::infinity();
  for (double t : ts) {
    AikawaSweepRow row;
    row.t = t;
    row.diverged = false;
    row.ratio_min = std::numeric_limits<double>::infinity();
    row.ratio_max = 0.0;
    double r = r_max;
    for (int k = 0; k < n_radii; ++k, r *= 0.5) {
      try {
        AikawaResult res = aikawa_integral(box_lo, box_hi, F, t, x, r, m_quad);
        row.ratio_min = std::min(row.ratio_min, res.ratio);
        row.ratio_max = std::max(row.ratio_max, res.ratio);
      } catch (const Error& e) {
        if (e.kind != ErrorKind::QuadratureUnderflow) throw;
        row.diverged = true;
        break;
      }
    }
    if (!row.diverged && row.ratio_max <= 4.0 * row.ratio_min)
      sweep.t_estimate = std::min(sweep.t_estimate, t);
    sweep.rows.push_back(row);
  }
  return sweep;
}

VolumeDensityProfile relative_volume_density(const VoxelDomain& dom, Vec y,
                                             const std::vector<double>& radii) {
  VolumeDensityProfile prof;
  prof.liminf = std::numeric_limits<double>::infinity();
  double celvol = std::pow(dom.h, dom.d);
  for (double r : radii) {
    double r2 = r * r;
    double vol = deterministic_sum(dom.inside_count(), [&](int64_t i) {
      Vec p = dom.center(dom.cells[static_cast<size_t>(i)]);
      return (dist2(p, y, dom.d) <= r2) ? celvol : 0.0;
    });
    prof.radii.push_back(r);
    prof.values.push_back(vol / std::pow(r, dom.d));
    prof.liminf = std::min(prof.liminf, vol / std::pow(r, dom.d));
  }
  return prof;
}

}  // namespace hardygeo
