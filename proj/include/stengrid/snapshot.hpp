#pragma once

#include "stengrid/cahn_hilliard.hpp"
#include "stengrid/grid.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace stengrid {

/// CSG1 field snapshot: magic "CSG1", little-endian u32 nx, u32 ny,
/// f64 dx, f64 dy, then nx*ny little-endian f64 values row-major. No padding.
void write_snapshot(const Grid2D& g, std::ostream& out);
void write_snapshot(const Grid2D& g, const std::string& path);
Grid2D read_snapshot(std::istream& in);
Grid2D read_snapshot(const std::string& path);

/// Diagnostics CSV: header "t,s,k1_inv", LF line endings, 17 significant
/// digits per value.
extern const char* const kDiagnosticsCsvHeader;
std::string format_diagnostics_row(const Diagnostics& d);
void write_diagnostics_csv(const std::vector<Diagnostics>& rows, std::ostream& out);
void write_diagnostics_csv(const std::vector<Diagnostics>& rows, const std::string& path);

}  // namespace stengrid
