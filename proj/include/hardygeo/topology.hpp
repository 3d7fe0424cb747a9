#pragma once

#include "hardygeo/grid.hpp"

namespace hardygeo {

enum class ScanOrder { Forward, Reverse };

// Face-connected components of a cell mask, honoring blocked faces. Labels
// are canonical (ordered by least contained cell), so the result does not
// depend on scan order or worker count.
struct ComponentLabeling {
  std::vector<int32_t> label;  // per linear cell, -1 off the mask
  int32_t count = 0;
  std::vector<int64_t> sizes;
};

ComponentLabeling components(const VoxelDomain& dom, const std::vector<uint8_t>& mask,
                             ScanOrder order = ScanOrder::Forward);

enum class HoleClass { DirichletEnclosed, Attached };

// One component of the complement of Omega in the index box.
struct HoleInfo {
  int32_t comp = 0;
  int64_t cells = 0;
  int64_t shared_faces = 0;    // faces between the hole and Omega
  int64_t shared_d_faces = 0;  // of those, Dirichlet-labeled
  bool touches_box = false;
  HoleClass cls = HoleClass::Attached;
};

// A hole is left out only when everything it shares with Omega is Dirichlet.
inline HoleClass classify_hole(int64_t shared, int64_t shared_d) {
  return (shared > 0 && shared_d == shared) ? HoleClass::DirichletEnclosed
                                            : HoleClass::Attached;
}

struct BulletDomain {
  VoxelDomain dom;  // Omega plus attached holes; D faces that became internal
                    // stay blocked, Gamma-labeled blocked faces are opened
  std::vector<HoleInfo> holes;
  std::string boundary_type;  // "D" or "D ∪ ∂B"
  int64_t attached_cells = 0;
};

BulletDomain build_bullet(const VoxelDomain& dom, const BoundaryLabeling& lab,
                          ScanOrder order = ScanOrder::Forward);

struct BulletCheck {
  bool pass = false;
  bool deterministic = false;     // rebuild under reversed scan is identical
  std::string boundary_type;
  std::vector<int64_t> discrepancies;  // offending face ids
};

// Face-level check that the bullet boundary is exactly D, or D plus a part of
// the box surface; also rebuilds with a perturbed scan order.
BulletCheck verify_bullet(const VoxelDomain& dom, const BoundaryLabeling& lab,
                          const BulletDomain& bullet);

// Lambda-star: unblock the E faces that are blocked internal faces.
struct StarDomain {
  VoxelDomain dom;
  std::vector<int64_t> xi_faces;     // boundary of Lambda minus E
  std::vector<int64_t> estar_faces;  // E faces still on the boundary
  std::vector<int64_t> opened;       // the formerly blocked E faces
};

StarDomain build_star(const VoxelDomain& dom, const std::vector<int64_t>& e_faces);

}  // namespace hardygeo
