#pragma once
/// @file grid.hpp
/// @brief Uniform rectangular grid with periodic or wall-bounded topology.
///
/// Cell centers sit at ((i+1/2)hx, (j+1/2)hy).  Staggered face positions are
/// x-faces at (i hx, (j+1/2)hy) and y-faces at ((i+1/2)hx, j hy).  Periodic
/// mode identifies face nx with face 0 (and ny with 0); Box mode keeps walls
/// where no-flux / no-slip conditions apply.

#include "nlchns/errors.hpp"

namespace nlchns {

enum class BoundaryMode { Periodic, Box };

struct Grid {
    int nx = 0;
    int ny = 0;
    double lx = 1.0;
    double ly = 1.0;
    BoundaryMode bc = BoundaryMode::Periodic;

    Grid() = default;
    Grid(int nx_, int ny_, double lx_, double ly_, BoundaryMode bc_)
        : nx(nx_), ny(ny_), lx(lx_), ly(ly_), bc(bc_) {
        validate();
    }

    void validate() const {
        if (nx < 8 || ny < 8)
            throw ConfigError("grid: nx and ny must be at least 8");
        if (nx % 2 != 0 || ny % 2 != 0)
            throw ConfigError("grid: nx and ny must be even");
        if (!(lx > 0.0) || !(ly > 0.0))
            throw ConfigError("grid: lx and ly must be positive");
    }

    bool periodic() const { return bc == BoundaryMode::Periodic; }
    double hx() const { return lx / nx; }
    double hy() const { return ly / ny; }
    double cell_area() const { return hx() * hy(); }
    double area() const { return lx * ly; }
    int ncells() const { return nx * ny; }

    double xc(int i) const { return (i + 0.5) * hx(); }
    double yc(int j) const { return (j + 0.5) * hy(); }
    double xf(int i) const { return i * hx(); }
    double yf(int j) const { return j * hy(); }

    bool operator==(const Grid&) const = default;
};

inline void require_same_grid(const Grid& a, const Grid& b, const char* where) {
    if (!(a == b))
        throw GridMismatch(std::string(where) + ": fields live on different grids");
}

}  // namespace nlchns
