#pragma once

#include <string>
#include <vector>

#include "hardygeo/grid.hpp"

namespace hardygeo {

// Round to 12 significant digits through the decimal form, so serialized
// numbers diff stably across platforms. Non-finite values pass through.
double round12(double x);

void write_text_file(const std::string& path, const std::string& content);

// Grayscale slice of a compact-indexed cell field: the plane normal to `axis`
// through cell layer `index`, min-max scaled to [1, 255]; cells outside the
// domain render 0.
void write_pgm_slice(const std::string& path, const VoxelDomain& dom,
                     const std::vector<double>& cell_values, int axis, int64_t index);

// One-line ASCII header, then the field over the full index box as
// little-endian doubles in linear cell order (0 outside the domain).
void write_field_bin(const std::string& path, const VoxelDomain& dom,
                     const std::vector<double>& cell_values);

std::string csv_line(const std::vector<std::string>& cells);

}  // namespace hardygeo
