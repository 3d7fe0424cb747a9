#pragma once

#include "hardygeo/csg.hpp"
#include "hardygeo/grid.hpp"

namespace hardygeo {

// CSG -> cell-centered voxel grid. Cell centers are tested against the solid;
// cracks become blocked internal faces; a disconnected inside set is pruned
// to its largest component (with a warning on the domain).
VoxelDomain rasterize(const ScenarioSpec& spec);

// Evaluates the Dirichlet predicate at boundary-face centroids, then closes
// the selected set in the boundary-face graph (faces whose entire edge/vertex
// neighborhood is Dirichlet are absorbed, to a fixpoint).
BoundaryLabeling label_boundary(const VoxelDomain& dom, const ScenarioSpec& spec);

// Exact Euclidean distance from inside cell centers to the nearest D-face
// centroid. All-infinite when D is empty.
DistanceField distance_to_D(const VoxelDomain& dom, const BoundaryLabeling& lab);

// Same transform against an arbitrary point set (used for dist to Gamma).
DistanceField distance_to_points(const VoxelDomain& dom, const std::vector<Vec>& pts);

// Face-rectangle adjacency: true when the closed faces share at least an
// edge/vertex. Both faces must belong to the same grid.
bool faces_touch(const VoxelDomain& dom, const BFace& a, const BFace& b);

}  // namespace hardygeo
