#pragma once

#include <functional>
#include <memory>
#include <unordered_map>
#include <vector>

#include "hardygeo/csg.hpp"
#include "hardygeo/grid.hpp"
#include "hardygeo/topology.hpp"

namespace hardygeo {

// Full: any grid function. VanishingOnD: interpreted with ghost value 0
// across every Dirichlet face, so the discrete trace on D is zero.
enum class Subspace { Full, VanishingOnD };

// Scalar function on the inside cells of a voxel domain (compact indexing).
struct GridFunction {
  const VoxelDomain* host = nullptr;
  std::vector<double> values;
  Subspace tag = Subspace::Full;

  // value by linear cell id; 0 outside the domain
  double at(int64_t cell) const {
    int32_t k = host->compact[static_cast<size_t>(cell)];
    return (k < 0) ? 0.0 : values[static_cast<size_t>(k)];
  }
};

GridFunction make_function(const VoxelDomain& dom, Subspace tag = Subspace::Full);
GridFunction sample_function(const VoxelDomain& dom,
                             const std::function<double(const Vec&)>& f,
                             Subspace tag = Subspace::Full);

// Precomputed face lists for gradient quadrature. Interior faces couple two
// cells; each Dirichlet face pins one cell against the ghost value 0 at
// distance h/2 (a Dirichlet-labeled crack face pins both sides). Gamma faces
// carry a homogeneous Neumann ghost and contribute nothing.
struct FaceCalculus {
  const VoxelDomain* host = nullptr;
  std::vector<int64_t> int_fid;                   // interior unblocked faces
  std::vector<std::array<int32_t, 2>> int_cells;  // compact (lower, upper)
  std::vector<int64_t> pin_fid;                   // one entry per pinned side
  std::vector<int32_t> pin_cell;                  // compact cell
  std::vector<int8_t> pin_orient;  // +1: ghost above the cell, -1: below
};

FaceCalculus face_calculus(const VoxelDomain& dom, const BoundaryLabeling& lab);
// plain calculus: no Dirichlet pins (boundary treated as all-Gamma)
FaceCalculus face_calculus(const VoxelDomain& dom);

// Difference quotients per face, oriented along +axis. Dirichlet-labeled
// crack faces carry two one-sided values, stored separately.
struct GradientField {
  const VoxelDomain* host = nullptr;
  std::vector<double> v;  // by face id; 0 on Gamma and blocked faces
  std::unordered_map<int64_t, std::array<double, 2>> crack_d;  // (lower, upper) sides
  double max_abs = 0.0;

  double at(int64_t fid) const { return v[static_cast<size_t>(fid)]; }
};

int64_t total_face_ids(const VoxelDomain& dom);

GradientField gradient(const GridFunction& u, const BoundaryLabeling& lab);
GradientField gradient(const GridFunction& u);  // no Dirichlet faces

// ||u||_p, ||grad u||_p, and optionally ||u/dist||_p; every cell and face
// term is weighted by h^d. The weighted norm requires a finite dist field
// (DEmpty otherwise).
Norms norms(const GridFunction& u, double p, const FaceCalculus& fc,
            const DistanceField* dist = nullptr);
Norms norms(const GridFunction& u, double p, const BoundaryLabeling& lab,
            const DistanceField* dist = nullptr);

// (||u||_p^p + ||grad u||_p^p)^(1/p)
double w_norm(const GridFunction& u, double p, const FaceCalculus& fc);

// Largest one-sided cell magnitude adjacent to a D face; 0 certifies the
// discrete Dirichlet condition. VanishingOnD functions trace to the ghost
// value, which is 0 by definition of the subspace.
double trace_sup(const GridFunction& u, const BoundaryLabeling& lab);

// Damps values toward 0 near D with a smoothstep of `width` cells (cells in
// the first layer go exactly to 0 for width >= 1) and tags VanishingOnD.
GridFunction enforce_D(const GridFunction& u, const BoundaryLabeling& lab,
                       double width = 2.0);

// Zero extension across the opened E faces of a star domain. Exactly
// norm-preserving when u vanishes on the cells adjacent to every opened
// face; NonzeroNearE otherwise.
GridFunction extend_by_zero(const GridFunction& u, const StarDomain& star);

// Partition of unity subordinate to the reflection patches plus an implicit
// far field supported away from Gamma. Weights live on the domain's cells;
// the cutoffs zeta_j live on the companion full box (same index box, every
// cell inside, crack faces kept).
struct PartitionOfUnity {
  const VoxelDomain* omega = nullptr;
  std::shared_ptr<VoxelDomain> box;
  std::vector<GluePatch> patches;
  int margin = 2;

  std::vector<double> far;               // eta, per compact cell of omega
  std::vector<std::vector<double>> eta;  // [patch][compact cell]
  std::vector<std::vector<double>> zeta; // [patch][linear box cell]
  std::vector<int8_t> largest;           // per compact cell: 0 = far, j+1 = patch j

  // weights summed in canonical order (largest last); exactly 1 on omega
  double weight_sum(int32_t k) const;
};

// With no patches the far field is identically 1. With patches, supports are
// anchored one cell inside the patch boxes (resp. one cell away from Gamma for
// the far field) but the ramps span a fixed fraction of the patch extent, so
// the cutoff gradients stay bounded under refinement; CoverGap if some inside
// cell ends up with zero total weight.
PartitionOfUnity build_partition(const VoxelDomain& dom, const BoundaryLabeling& lab,
                                 const std::vector<GluePatch>& patches, int margin = 2);

// E(u) = zero-extension of eta*u plus sum_j zeta_j * reflect_j(eta_j * u),
// with per-column even reflection across the patch's boundary face. Equals u
// on omega exactly; `ratio` is ||E(u)||_W(box) / ||u||_W(omega), both with
// the plain (pin-free) gradient quadrature.
struct GlueResult {
  GridFunction eu;  // hosted on pou.box
  double ratio = 0.0;
};

GlueResult glue_extension(const GridFunction& u, const PartitionOfUnity& pou, double p);

}  // namespace hardygeo
