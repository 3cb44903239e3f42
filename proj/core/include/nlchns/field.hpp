#pragma once
/// @file field.hpp
/// @brief Cell-centered scalar fields and staggered (MAC) vector fields.
///
/// ScalarField stores nx*ny cell values, row-major with j slowest
/// (index = j*nx + i).  VectorField stores the x-component on (nx+1)*ny
/// x-faces and the y-component on nx*(ny+1) y-faces.  In Periodic mode the
/// last face column/row duplicates index 0; constructive operations keep the
/// duplicates in sync (sync_periodic), so divergence-type stencils can read
/// i+1 / j+1 without wrapping.

#include <vector>

#include "nlchns/grid.hpp"

namespace nlchns {

class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const Grid& g, double fill = 0.0)
        : g_(g), v_(static_cast<std::size_t>(g.nx) * g.ny, fill) {}

    const Grid& grid() const { return g_; }
    bool empty() const { return v_.empty(); }
    int nx() const { return g_.nx; }
    int ny() const { return g_.ny; }
    std::size_t size() const { return v_.size(); }

    double& operator()(int i, int j) { return v_[idx(i, j)]; }
    double operator()(int i, int j) const { return v_[idx(i, j)]; }

    /// Read with periodic wrap on both indices (one period each side).
    double wrap(int i, int j) const {
        if (i < 0) i += g_.nx;
        if (i >= g_.nx) i -= g_.nx;
        if (j < 0) j += g_.ny;
        if (j >= g_.ny) j -= g_.ny;
        return v_[idx(i, j)];
    }

    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }

    void fill(double value) { v_.assign(v_.size(), value); }

    ScalarField& operator+=(const ScalarField& o) {
        require_same_grid(g_, o.g_, "ScalarField +=");
        for (std::size_t k = 0; k < v_.size(); ++k) v_[k] += o.v_[k];
        return *this;
    }
    ScalarField& operator-=(const ScalarField& o) {
        require_same_grid(g_, o.g_, "ScalarField -=");
        for (std::size_t k = 0; k < v_.size(); ++k) v_[k] -= o.v_[k];
        return *this;
    }
    ScalarField& operator*=(double s) {
        for (double& x : v_) x *= s;
        return *this;
    }
    ScalarField& operator+=(double c) {
        for (double& x : v_) x += c;
        return *this;
    }

private:
    std::size_t idx(int i, int j) const {
        return static_cast<std::size_t>(j) * g_.nx + i;
    }

    Grid g_;
    std::vector<double> v_;
};

class VectorField {
public:
    VectorField() = default;
    explicit VectorField(const Grid& g, double fill = 0.0)
        : g_(g),
          ux_(static_cast<std::size_t>(g.nx + 1) * g.ny, fill),
          uy_(static_cast<std::size_t>(g.nx) * (g.ny + 1), fill) {}

    const Grid& grid() const { return g_; }
    bool empty() const { return ux_.empty(); }

    /// x-component on x-faces: i in [0, nx], j in [0, ny).
    double& ux(int i, int j) { return ux_[uxidx(i, j)]; }
    double ux(int i, int j) const { return ux_[uxidx(i, j)]; }

    /// y-component on y-faces: i in [0, nx), j in [0, ny].
    double& uy(int i, int j) { return uy_[uyidx(i, j)]; }
    double uy(int i, int j) const { return uy_[uyidx(i, j)]; }

    std::size_t ux_size() const { return ux_.size(); }
    std::size_t uy_size() const { return uy_.size(); }
    double* ux_data() { return ux_.data(); }
    const double* ux_data() const { return ux_.data(); }
    double* uy_data() { return uy_.data(); }
    const double* uy_data() const { return uy_.data(); }

    void fill(double value) {
        ux_.assign(ux_.size(), value);
        uy_.assign(uy_.size(), value);
    }

    /// Periodic mode: copy face column 0 to column nx and face row 0 to
    /// row ny so unwrapped +1 stencil reads see the right values.
    void sync_periodic() {
        if (!g_.periodic()) return;
        for (int j = 0; j < g_.ny; ++j) ux(g_.nx, j) = ux(0, j);
        for (int i = 0; i < g_.nx; ++i) uy(i, g_.ny) = uy(i, 0);
    }

    /// Box mode: pin wall-normal faces to zero (no-penetration).
    void zero_wall_normals() {
        if (g_.periodic()) return;
        for (int j = 0; j < g_.ny; ++j) {
            ux(0, j) = 0.0;
            ux(g_.nx, j) = 0.0;
        }
        for (int i = 0; i < g_.nx; ++i) {
            uy(i, 0) = 0.0;
            uy(i, g_.ny) = 0.0;
        }
    }

    /// Re-establish the boundary representation invariant for this mode.
    void enforce_bc() {
        if (g_.periodic())
            sync_periodic();
        else
            zero_wall_normals();
    }

    VectorField& operator+=(const VectorField& o) {
        require_same_grid(g_, o.g_, "VectorField +=");
        for (std::size_t k = 0; k < ux_.size(); ++k) ux_[k] += o.ux_[k];
        for (std::size_t k = 0; k < uy_.size(); ++k) uy_[k] += o.uy_[k];
        return *this;
    }
    VectorField& operator-=(const VectorField& o) {
        require_same_grid(g_, o.g_, "VectorField -=");
        for (std::size_t k = 0; k < ux_.size(); ++k) ux_[k] -= o.ux_[k];
        for (std::size_t k = 0; k < uy_.size(); ++k) uy_[k] -= o.uy_[k];
        return *this;
    }
    VectorField& operator*=(double s) {
        for (double& x : ux_) x *= s;
        for (double& x : uy_) x *= s;
        return *this;
    }

private:
    std::size_t uxidx(int i, int j) const {
        return static_cast<std::size_t>(j) * (g_.nx + 1) + i;
    }
    std::size_t uyidx(int i, int j) const {
        return static_cast<std::size_t>(j) * g_.nx + i;
    }

    Grid g_;
    std::vector<double> ux_, uy_;
};

}  // namespace nlchns
