#pragma once

#include <iosfwd>
#include <string>

#include "cbf/field.hpp"

namespace cbf {

/// Flat binary container: header (n: u64, box_length: f64, components: u64,
/// all little-endian) followed by interleaved re/im coefficient pairs per
/// component in row-major mode order, little-endian 64-bit floats.
void write_field(std::ostream& os, const VelocityField& f);
VelocityField read_field(std::istream& is);

void save_field(const std::string& path, const VelocityField& f);
VelocityField load_field(const std::string& path);

/// Mode-by-mode CSV dump (m1, m2, re/im per component); intended for small grids.
std::string field_to_csv(const VelocityField& f);

} // namespace cbf
