#include "hardygeo/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>

namespace hardygeo {

double round12(double x) {
  if (!std::isfinite(x)) return x;
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.11e", x);
  return std::strtod(buf, nullptr);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Config, "cannot open for writing: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorKind::Config, "write failed: " + path);
}

void write_pgm_slice(const std::string& path, const VoxelDomain& dom,
                     const std::vector<double>& cell_values, int axis, int64_t index) {
  if (axis < 0 || axis > 2 || index < 0 || index >= dom.dims[axis])
    throw Error(ErrorKind::Config, "slice index out of range");
  int a1 = (axis == 0) ? 1 : 0;           // image x
  int a2 = (axis == 2) ? 1 : 2;           // image y
  int64_t w = dom.dims[a1], hgt = dom.dims[a2];

  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (int64_t k = 0; k < dom.inside_count(); ++k) {
    double v = cell_values[static_cast<size_t>(k)];
    if (first || v < lo) lo = v;
    if (first || v > hi) hi = v;
    first = false;
  }
  double scale = (hi > lo) ? 254.0 / (hi - lo) : 0.0;

  std::string body;
  body.reserve(static_cast<size_t>(w * hgt));
  for (int64_t j = hgt - 1; j >= 0; --j) {  // top row = largest coordinate
    for (int64_t i = 0; i < w; ++i) {
      IVec c = {0, 0, 0};
      c[axis] = index;
      c[a1] = i;
      c[a2] = j;
      int64_t l = dom.lin(c);
      int32_t k = dom.compact[static_cast<size_t>(l)];
      unsigned char px = 0;
      if (k >= 0) {
        double v = cell_values[static_cast<size_t>(k)];
        px = static_cast<unsigned char>(1.5 + scale * (v - lo));
      }
      body.push_back(static_cast<char>(px));
    }
  }
  char head[64];
  std::snprintf(head, sizeof(head), "P5\n%lld %lld\n255\n", static_cast<long long>(w),
                static_cast<long long>(hgt));
  write_text_file(path, std::string(head) + body);
}

void write_field_bin(const std::string& path, const VoxelDomain& dom,
                     const std::vector<double>& cell_values) {
  char head[160];
  std::snprintf(head, sizeof(head), "field d=%d dims=%lld,%lld,%lld h=%.17g\n", dom.d,
                static_cast<long long>(dom.dims[0]), static_cast<long long>(dom.dims[1]),
                static_cast<long long>(dom.dims[2]), dom.h);
  std::string out(head);
  int64_t nc = dom.ncells();
  out.reserve(out.size() + static_cast<size_t>(nc) * 8);
  for (int64_t l = 0; l < nc; ++l) {
    int32_t k = dom.compact[static_cast<size_t>(l)];
    double v = (k >= 0) ? cell_values[static_cast<size_t>(k)] : 0.0;
    uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
  }
  write_text_file(path, out);
}

std::string csv_line(const std::vector<std::string>& cells) {
  std::string s;
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) s.push_back(',');
    s += cells[i];
  }
  s.push_back('\n');
  return s;
}

}  // namespace hardygeo
