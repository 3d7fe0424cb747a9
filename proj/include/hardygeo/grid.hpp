#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "hardygeo/common.hpp"

namespace hardygeo {

// Cell-centered voxel grid over an axis-aligned index box. Cells are open
// cubes of side h; cell (i,j,k) has center origin + (i+1/2, j+1/2, k+1/2)h.
// Unused axes (a >= d) have dims[a] = 1.
//
// Faces are identified by (axis, coordinate of the upper adjacent cell); the
// component along the axis runs to dims[axis] inclusive, so faces on the
// surface of the index box are addressable. Blocked faces (measure-zero
// cracks) live between two inside cells and are stored per lower cell.
class VoxelDomain {
public:
  int d = 2;
  double h = 1.0;
  IVec dims = {1, 1, 1};
  Vec origin = {0.0, 0.0, 0.0};
  std::string name;
  std::string warning;  // set when rasterization drops disconnected parts

  std::vector<uint8_t> inside;
  std::vector<uint8_t> blocked;       // 3*ncells, indexed by lower cell & axis
  std::vector<int64_t> cells;         // linear ids of inside cells (scan order)
  std::vector<int32_t> compact;       // cell -> index into `cells`, -1 outside

  int64_t ncells() const { return dims[0] * dims[1] * dims[2]; }
  int64_t inside_count() const { return static_cast<int64_t>(cells.size()); }

  int64_t lin(const IVec& c) const { return (c[2] * dims[1] + c[1]) * dims[0] + c[0]; }
  IVec unlin(int64_t l) const {
    IVec c;
    c[0] = l % dims[0];
    c[1] = (l / dims[0]) % dims[1];
    c[2] = l / (dims[0] * dims[1]);
    return c;
  }
  bool in_box(const IVec& c) const {
    for (int a = 0; a < 3; ++a)
      if (c[a] < 0 || c[a] >= dims[a]) return false;
    return true;
  }
  bool is_inside(int64_t l) const { return inside[static_cast<size_t>(l)] != 0; }
  bool is_inside(const IVec& c) const { return in_box(c) && is_inside(lin(c)); }

  Vec center(int64_t l) const {
    IVec c = unlin(l);
    Vec p = {0, 0, 0};
    for (int a = 0; a < d; ++a) p[a] = origin[a] + (static_cast<double>(c[a]) + 0.5) * h;
    return p;
  }

  bool is_blocked(int64_t lower, int axis) const {
    return blocked[static_cast<size_t>(lower) * 3 + axis] != 0;
  }
  void set_blocked(int64_t lower, int axis, bool v) {
    blocked[static_cast<size_t>(lower) * 3 + axis] = v ? 1 : 0;
  }

  // -- face ids ---------------------------------------------------------
  int64_t faces_per_axis(int axis) const {
    int64_t n = 1;
    for (int a = 0; a < 3; ++a) n *= (a == axis) ? dims[a] + 1 : dims[a];
    return n;
  }
  int64_t face_base(int axis) const {
    int64_t b = 0;
    for (int a = 0; a < axis; ++a) b += faces_per_axis(a);
    return b;
  }
  // fc = coordinates of the upper adjacent cell (fc[axis] in [0, dims[axis]])
  int64_t face_id(int axis, const IVec& fc) const {
    IVec fd = dims;
    fd[axis] += 1;
    return face_base(axis) + (fc[2] * fd[1] + fc[1]) * fd[0] + fc[0];
  }
  void face_decode(int64_t fid, int& axis, IVec& fc) const {
    axis = 0;
    while (axis < 2 && fid >= face_base(axis + 1)) ++axis;
    int64_t r = fid - face_base(axis);
    IVec fd = dims;
    fd[axis] += 1;
    fc[0] = r % fd[0];
    fc[1] = (r / fd[0]) % fd[1];
    fc[2] = r / (fd[0] * fd[1]);
  }
  // linear ids of the two adjacent cells; -1 when outside the index box
  void face_cells(int64_t fid, int64_t& lo, int64_t& hi) const {
    int axis;
    IVec fc;
    face_decode(fid, axis, fc);
    IVec lc = fc;
    lc[axis] -= 1;
    lo = (lc[axis] >= 0) ? lin(lc) : -1;
    hi = (fc[axis] < dims[axis]) ? lin(fc) : -1;
  }
  Vec face_centroid(int64_t fid) const {
    int axis;
    IVec fc;
    face_decode(fid, axis, fc);
    Vec p = {0, 0, 0};
    for (int a = 0; a < d; ++a) {
      double o = (a == axis) ? 0.0 : 0.5;
      p[a] = origin[a] + (static_cast<double>(fc[a]) + o) * h;
    }
    return p;
  }
  int face_axis(int64_t fid) const {
    int axis;
    IVec fc;
    face_decode(fid, axis, fc);
    return axis;
  }
  // face between cell c and its +axis neighbor
  int64_t upper_face(const IVec& c, int axis) const {
    IVec fc = c;
    fc[axis] += 1;
    return face_id(axis, fc);
  }
  int64_t lower_face(const IVec& c, int axis) const { return face_id(axis, c); }

  // rebuild `cells` / `compact` after editing the mask
  void finalize();
};

// One face of the discrete boundary. kind: 0 = lower cell inside (outward
// normal +axis), 1 = upper cell inside, 2 = blocked crack face (both inside).
struct BFace {
  int64_t fid;
  int axis;
  int64_t lo, hi;  // linear cell ids, -1 if outside the index box
  uint8_t kind;
  Vec centroid;
};

// All discrete boundary faces of the domain: inside/outside faces plus
// blocked internal faces, in deterministic scan order.
std::vector<BFace> boundary_faces(const VoxelDomain& dom);

struct BoundaryLabeling {
  std::vector<BFace> faces;
  std::vector<uint8_t> dirichlet;     // parallel to faces
  std::vector<Vec> d_points;          // centroids of D faces
  std::unordered_map<int64_t, int32_t> index;  // fid -> position in faces

  int64_t d_count() const {
    int64_t n = 0;
    for (uint8_t b : dirichlet) n += b;
    return n;
  }
  bool d_empty() const { return d_count() == 0; }
};

// Exact Euclidean distance from each inside cell center to the nearest D face
// centroid; `infinite` when D is empty.
struct DistanceField {
  std::vector<double> v;  // compact cell indexing
  bool infinite = false;
  double max_value = 0.0;
};

}  // namespace hardygeo
