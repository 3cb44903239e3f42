#pragma once
/// @file snapshot.hpp
/// @brief Field snapshot files.
///
/// Format: one ASCII header line
///   NLCHNS1 kind=<scalar|vector> nx=<int> ny=<int> lx=<float> ly=<float> bc=<p|b>\n
/// followed by raw little-endian float64 payload.  Scalars store nx*ny cell
/// values row-major (j slowest).  Vectors store the full ux block
/// ((nx+1)*ny) then the uy block (nx*(ny+1)), same layout as in memory.
/// Floats in the header are shortest round-trip decimal (to_chars), so
/// write/read/write is byte-identical.

#include <string>

#include "nlchns/field.hpp"

namespace nlchns {

struct Snapshot {
    bool is_vector = false;
    ScalarField scalar;
    VectorField vector;

    const Grid& grid() const {
        return is_vector ? vector.grid() : scalar.grid();
    }
};

void write_snapshot(const std::string& path, const ScalarField& f);
void write_snapshot(const std::string& path, const VectorField& v);
Snapshot read_snapshot(const std::string& path);

/// Shortest round-trip decimal for a double (no locale, deterministic).
std::string format_double(double x);

/// Strict full-string parse; throws FormatError (offset 0) on failure.
double parse_double(const std::string& s);

}  // namespace nlchns
