#include "hardygeo/grid.hpp"

#include "hardygeo/parallel.hpp"

namespace hardygeo {

namespace {
int g_thread_cap = 0;
bool g_parallel = true;
}  // namespace

void set_thread_cap(int n) { g_thread_cap = n; }
int thread_cap() { return g_thread_cap; }
void set_parallel_enabled(bool on) { g_parallel = on; }
bool parallel_enabled() { return g_parallel; }

const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::EmptyDomain: return "EmptyDomain";
    case ErrorKind::CrackNotInterior: return "CrackNotInterior";
    case ErrorKind::BadDimension: return "BadDimension";
    case ErrorKind::ScaleTooFine: return "ScaleTooFine";
    case ErrorKind::QuadratureUnderflow: return "QuadratureUnderflow";
    case ErrorKind::DEmpty: return "DEmpty";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::ENotOnBoundary: return "ENotOnBoundary";
    case ErrorKind::NonzeroNearE: return "NonzeroNearE";
    case ErrorKind::CoverGap: return "CoverGap";
    case ErrorKind::PatchNotReflectable: return "PatchNotReflectable";
    case ErrorKind::ConditionFailed: return "ConditionFailed";
    case ErrorKind::Config: return "Config";
  }
  return "Unknown";
}

void VoxelDomain::finalize() {
  cells.clear();
  compact.assign(static_cast<size_t>(ncells()), -1);
  for (int64_t l = 0; l < ncells(); ++l) {
    if (inside[static_cast<size_t>(l)]) {
      compact[static_cast<size_t>(l)] = static_cast<int32_t>(cells.size());
      cells.push_back(l);
    }
  }
}

std::vector<BFace> boundary_faces(const VoxelDomain& dom) {
  std::vector<BFace> out;
  for (int64_t l = 0; l < dom.ncells(); ++l) {
    if (!dom.is_inside(l)) continue;
    IVec c = dom.unlin(l);
    for (int a = 0; a < dom.d; ++a) {
      // lower side first, then upper, for a stable face order
      IVec nb = c;
      nb[a] -= 1;
      bool lower_in = dom.is_inside(nb);
      if (!lower_in) {
        BFace f;
        f.fid = dom.lower_face(c, a);
        f.axis = a;
        f.lo = (nb[a] >= 0) ? dom.lin(nb) : -1;
        f.hi = l;
        f.kind = 1;
        f.centroid = dom.face_centroid(f.fid);
        out.push_back(f);
      }
      nb = c;
      nb[a] += 1;
      bool upper_in = dom.is_inside(nb);
      if (!upper_in) {
        BFace f;
        f.fid = dom.upper_face(c, a);
        f.axis = a;
        f.lo = l;
        f.hi = (nb[a] < dom.dims[a]) ? dom.lin(nb) : -1;
        f.kind = 0;
        f.centroid = dom.face_centroid(f.fid);
        out.push_back(f);
      } else if (dom.is_blocked(l, a)) {
        BFace f;
        f.fid = dom.upper_face(c, a);
        f.axis = a;
        f.lo = l;
        f.hi = dom.lin(nb);
        f.kind = 2;
        f.centroid = dom.face_centroid(f.fid);
        out.push_back(f);
      }
    }
  }
  return out;
}

}  // namespace hardygeo
