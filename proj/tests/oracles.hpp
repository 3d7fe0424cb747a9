#pragma once

// Shared oracles: dense generalized eigensolves via Eigen and brute-force
// geometry, re-derived from the quadrature definitions rather than the
// library's assembly code.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <vector>

#include "hardygeo/csg.hpp"
#include "hardygeo/grid.hpp"
#include "hardygeo/scenario.hpp"

namespace oracles {

using hardygeo::BoundaryLabeling;
using hardygeo::ScenarioSpec;
using hardygeo::Vec;
using hardygeo::VoxelDomain;

struct Built {
  VoxelDomain dom;
  BoundaryLabeling lab;
};

inline Built build(const ScenarioSpec& spec) {
  Built b;
  b.dom = hardygeo::rasterize(spec);
  b.lab = hardygeo::label_boundary(b.dom, spec);
  return b;
}

inline Built build_named(const std::string& name, int64_t n = 0) {
  ScenarioSpec spec = hardygeo::built_in_scenario(name);
  if (n > 0) spec.resolution = n;
  return build(spec);
}

// Dense stiffness form: sum over unblocked interior faces of h^(d-2) (u_i-u_j)^2
// plus 4 h^(d-2) u_k^2 per Dirichlet pin (both sides of a Dirichlet crack face).
inline Eigen::MatrixXd dense_stiffness(const VoxelDomain& dom, const BoundaryLabeling& lab) {
  int64_t n = dom.inside_count();
  double hc = std::pow(dom.h, dom.d - 2);
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (int64_t l = 0; l < dom.ncells(); ++l) {
    if (!dom.is_inside(l)) continue;
    hardygeo::IVec c = dom.unlin(l);
    int32_t i = dom.compact[static_cast<size_t>(l)];
    for (int a = 0; a < dom.d; ++a) {
      if (c[a] + 1 >= dom.dims[a]) continue;
      hardygeo::IVec m = c;
      m[a] += 1;
      int64_t lm = dom.lin(m);
      if (!dom.is_inside(lm)) continue;
      if (dom.is_blocked(l, a)) continue;
      int32_t j = dom.compact[static_cast<size_t>(lm)];
      L(i, i) += hc;
      L(j, j) += hc;
      L(i, j) -= hc;
      L(j, i) -= hc;
    }
  }
  for (size_t f = 0; f < lab.faces.size(); ++f) {
    if (!lab.dirichlet[f]) continue;
    const hardygeo::BFace& bf = lab.faces[f];
    for (int64_t cell : {bf.lo, bf.hi}) {
      if (cell < 0 || !dom.is_inside(cell)) continue;
      int32_t i = dom.compact[static_cast<size_t>(cell)];
      L(i, i) += 4.0 * hc;
    }
  }
  return L;
}

// Dense weight: diag(h^d / dist^2) for the Hardy pencil, diag(h^d) for Poincare.
inline Eigen::MatrixXd dense_weight(const VoxelDomain& dom, const BoundaryLabeling& lab,
                                    bool hardy) {
  int64_t n = dom.inside_count();
  double cw = std::pow(dom.h, dom.d);
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n, cw);
  if (hardy) {
    hardygeo::DistanceField dd = hardygeo::distance_to_D(dom, lab);
    for (int64_t k = 0; k < n; ++k)
      w[k] = cw / (dd.v[static_cast<size_t>(k)] * dd.v[static_cast<size_t>(k)]);
  }
  return w.asDiagonal();
}

// Top eigenvalue of W u = lambda L u (L symmetric positive definite).
inline double dense_top(const Eigen::MatrixXd& W, const Eigen::MatrixXd& L) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(W, L);
  return es.eigenvalues().maxCoeff();
}

inline double dense_hardy(const VoxelDomain& dom, const BoundaryLabeling& lab) {
  return dense_top(dense_weight(dom, lab, true), dense_stiffness(dom, lab));
}

inline double dense_poincare(const VoxelDomain& dom, const BoundaryLabeling& lab) {
  return dense_top(dense_weight(dom, lab, false), dense_stiffness(dom, lab));
}

// Brute-force nearest distance from each inside cell center to a point set.
inline std::vector<double> brute_nn(const VoxelDomain& dom, const std::vector<Vec>& pts) {
  std::vector<double> out(static_cast<size_t>(dom.inside_count()),
                          std::numeric_limits<double>::infinity());
  for (int64_t k = 0; k < dom.inside_count(); ++k) {
    Vec p = dom.center(dom.cells[static_cast<size_t>(k)]);
    double best = std::numeric_limits<double>::infinity();
    for (const Vec& q : pts) {
      double s = 0;
      for (int a = 0; a < dom.d; ++a) s += (p[a] - q[a]) * (p[a] - q[a]);
      best = std::min(best, s);
    }
    out[static_cast<size_t>(k)] = std::sqrt(best);
  }
  return out;
}

}  // namespace oracles
