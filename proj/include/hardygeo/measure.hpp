#pragma once

#include "hardygeo/grid.hpp"

namespace hardygeo {

// Finite sample of a compact set F, carrying a surrogate measure (mass per
// point) for the lower-bound estimators. sep is the sampling pitch: the true
// set lies within sep of the sample.
struct PointCloud {
  std::vector<Vec> points;
  std::vector<double> mass;
  double sep = 0.0;
  int d = 2;
  bool empty_flag = false;

  double total_mass() const {
    double s = 0.0;
    for (double m : mass) s += m;
    return s;
  }
  double diameter() const;  // bounding-box diagonal
};

PointCloud cloud_segment(Vec a, Vec b, int n, int d);
PointCloud cloud_circle(Vec c, double radius, int n);
PointCloud cloud_square_boundary(Vec lo, double side, int n_per_side);
PointCloud cloud_square_area(Vec lo, double side, int n_per_axis);
PointCloud cloud_point(Vec p, int d, double sep);
PointCloud cloud_empty(int d);
// D-face centroids with mass h^(d-1) per face
PointCloud cloud_from_labeling(const VoxelDomain& dom, const BoundaryLabeling& lab);

struct BallCover {
  std::vector<Vec> centers;
  std::vector<double> radii;
  size_t size() const { return radii.size(); }
  double power_sum(double l) const {
    double s = 0.0;
    for (double r : radii) s += std::pow(r, l);
    return s;
  }
};

struct ContentEstimate {
  double l = 1.0;
  double upper = 0.0;
  double lower = 0.0;
  double slack = 0.0;       // discreteness allowance of the upper cover
  double family_max = 0.0;  // C = max mu(B)/r^l over the tested family
  BallCover cover;
};

// Greedy dyadic-ladder cover (mixed-radius improvement passes included).
// Upper bound for the content of the sampled set, up to the reported slack.
// r_min/r_max <= 0 pick defaults (sep and the cloud diameter).
ContentEstimate content_upper(const PointCloud& cloud, double l, double r_min = -1.0,
                              double r_max = -1.0);

// Mass-distribution lower bound: total mass / max_family mu(B(x,r))/r^l,
// radii floored at 8*sep against sampling artifacts.
ContentEstimate content_lower(const PointCloud& cloud, double l);

struct ThicknessSample {
  Vec x;
  double r;
  double ratio;
};

struct ThicknessReport {
  double l = 1.0, R = 0.5, gamma_req = 0.5;
  std::vector<ThicknessSample> samples;
  double gamma_min = 0.0;
  bool pass = false;
};

ThicknessReport check_thickness(const PointCloud& cloud, double l, double R, int n_samples,
                                double gamma_req, uint64_t seed);

struct LSetReport {
  double l = 1.0;
  double c0 = 0.0, c1 = 0.0;
  bool pass = false;
  std::vector<ThicknessSample> samples;  // ratio = mu(F cap B)/r^l
};

LSetReport check_l_set(const PointCloud& cloud, double l, int n_samples, uint64_t seed);

struct PorosityBall {
  Vec x;
  double r;
  double kappa;  // largest kappa from the grid at which a hole was found; 0 = none
};

struct PorosityReport {
  std::vector<double> kappa_grid;
  std::vector<PorosityBall> balls;
  double kappa_best = 0.0;  // min over balls
  std::vector<size_t> failures;  // balls with no hole at any tested kappa
};

// r <= r_max (default 1, matching the porosity definition's scale cap)
PorosityReport check_porosity(const PointCloud& cloud, const std::vector<double>& kappas,
                              int n_balls, uint64_t seed, double r_max = 1.0);

// Midpoint quadrature of dist(.,F)^(t-d) over B(x,r) clipped to the box.
// Throws QuadratureUnderflow when refinement keeps doubling the value
// (non-integrable exponent) or t <= 0.
struct AikawaResult {
  double value = 0.0;
  double ratio = 0.0;  // value / r^t
};
AikawaResult aikawa_integral(Vec box_lo, Vec box_hi, const PointCloud& F, double t, Vec x,
                             double r, int m_quad = 0);

struct AikawaSweepRow {
  double t;
  double ratio_min, ratio_max;
  bool diverged;
};
struct AikawaSweep {
  std::vector<AikawaSweepRow> rows;
  double t_estimate = 0.0;  // smallest tested t with bounded ratios
};
AikawaSweep aikawa_sweep(Vec box_lo, Vec box_hi, const PointCloud& F,
                         const std::vector<double>& ts, Vec x, double r_max, int n_radii,
                         int m_quad = 0);

// |B(y,r) cap Omega| / r^d per radius, plus the ladder minimum.
struct VolumeDensityProfile {
  std::vector<double> radii;
  std::vector<double> values;
  double liminf = 0.0;
};
VolumeDensityProfile relative_volume_density(const VoxelDomain& dom, Vec y,
                                             const std::vector<double>& radii);

}  // namespace hardygeo
