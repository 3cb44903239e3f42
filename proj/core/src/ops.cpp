#include "nlchns/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace nlchns {

namespace {

inline int wrap_idx(int i, int n) {
    if (i < 0) return i + n;
    if (i >= n) return i - n;
    return i;
}

/// Quadrature weight of face index i out of [0, n] (Box halves wall faces).
inline double face_w(int i, int n, bool periodic) {
    if (periodic) return 1.0;
    return (i == 0 || i == n) ? 0.5 : 1.0;
}

}  // namespace

// ---- means and inner products ----------------------------------------------

double mean(const ScalarField& f) {
    double s = 0.0;
    const double* p = f.data();
    for (std::size_t k = 0; k < f.size(); ++k) s += p[k];
    return s / static_cast<double>(f.size());
}

double max_abs(const ScalarField& f) {
    double m = 0.0;
    const double* p = f.data();
    for (std::size_t k = 0; k < f.size(); ++k) m = std::max(m, std::abs(p[k]));
    return m;
}

double dot(const ScalarField& f, const ScalarField& g) {
    require_same_grid(f.grid(), g.grid(), "dot(scalar)");
    double s = 0.0;
    const double* a = f.data();
    const double* b = g.data();
    for (std::size_t k = 0; k < f.size(); ++k) s += a[k] * b[k];
    return s * f.grid().cell_area();
}

double dot(const VectorField& a, const VectorField& b) {
    require_same_grid(a.grid(), b.grid(), "dot(vector)");
    const Grid& g = a.grid();
    const bool per = g.periodic();
    const int nxu = per ? g.nx : g.nx + 1;  // skip duplicate column in periodic
    const int nyv = per ? g.ny : g.ny + 1;
    double s = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < nxu; ++i)
            s += face_w(i, g.nx, per) * a.ux(i, j) * b.ux(i, j);
    for (int j = 0; j < nyv; ++j)
        for (int i = 0; i < g.nx; ++i)
            s += face_w(j, g.ny, per) * a.uy(i, j) * b.uy(i, j);
    return s * g.cell_area();
}

NormSuite norms(const ScalarField& f) {
    NormSuite n;
    const double* p = f.data();
    double s2 = 0.0, s4 = 0.0, si = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
        const double v = p[k];
        const double v2 = v * v;
        s2 += v2;
        s4 += v2 * v2;
        si = std::max(si, std::abs(v));
    }
    const double w = f.grid().cell_area();
    n.l2 = std::sqrt(s2 * w);
    n.l4 = std::pow(s4 * w, 0.25);
    n.linf = si;

    const VectorField gf = gradient(f);
    n.h1_semi = std::sqrt(dot(gf, gf));
    return n;
}

NormSuite norms(const VectorField& v) {
    NormSuite n;
    const Grid& g = v.grid();
    const bool per = g.periodic();
    const double w = g.cell_area();

    n.l2 = std::sqrt(dot(v, v));

    // linf over raw face samples (used by CFL control).
    double si = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) si = std::max(si, std::abs(v.ux(i, j)));
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) si = std::max(si, std::abs(v.uy(i, j)));
    n.linf = si;

    // l4 of the speed, collocated at cell centers.
    double s4 = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double cx = 0.5 * (v.ux(i, j) + v.ux(i + 1, j));
            const double cy = 0.5 * (v.uy(i, j) + v.uy(i, j + 1));
            const double sp2 = cx * cx + cy * cy;
            s4 += sp2 * sp2;
        }
    n.l4 = std::pow(s4 * w, 0.25);

    // Full velocity-gradient seminorm: normal derivatives at centers, cross
    // derivatives at corners (Box walls: no-slip ghost, one-sided 2u/h).
    const double hx = g.hx(), hy = g.hy();
    double sg = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double dxux = (v.ux(i + 1, j) - v.ux(i, j)) / hx;
            const double dyuy = (v.uy(i, j + 1) - v.uy(i, j)) / hy;
            sg += dxux * dxux + dyuy * dyuy;
        }
    const int nxc = per ? g.nx : g.nx + 1;
    const int nyc = per ? g.ny : g.ny + 1;
    for (int j = 0; j < nyc; ++j)
        for (int i = 0; i < nxc; ++i) {
            const double wc = face_w(i, g.nx, per) * face_w(j, g.ny, per);
            double dyux, dxuy;
            if (per) {
                dyux = (v.ux(i, j) - v.ux(i, wrap_idx(j - 1, g.ny))) / hy;
                dxuy = (v.uy(i, j) - v.uy(wrap_idx(i - 1, g.nx), j)) / hx;
            } else {
                if (j == 0)
                    dyux = 2.0 * v.ux(i, 0) / hy;
                else if (j == g.ny)
                    dyux = -2.0 * v.ux(i, g.ny - 1) / hy;
                else
                    dyux = (v.ux(i, j) - v.ux(i, j - 1)) / hy;
                if (i == 0)
                    dxuy = 2.0 * v.uy(0, j) / hx;
                else if (i == g.nx)
                    dxuy = -2.0 * v.uy(g.nx - 1, j) / hx;
                else
                    dxuy = (v.uy(i, j) - v.uy(i - 1, j)) / hx;
            }
            sg += wc * (dyux * dyux + dxuy * dxuy);
        }
    n.h1_semi = std::sqrt(sg * w);
    return n;
}

// ---- first-order operators ---------------------------------------------------

VectorField gradient(const ScalarField& f) {
    const Grid& g = f.grid();
    VectorField out(g);
    const double hx = g.hx(), hy = g.hy();
    if (g.periodic()) {
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                out.ux(i, j) = (f(i, j) - f.wrap(i - 1, j)) / hx;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                out.uy(i, j) = (f(i, j) - f.wrap(i, j - 1)) / hy;
        out.sync_periodic();
    } else {
        for (int j = 0; j < g.ny; ++j)
            for (int i = 1; i < g.nx; ++i)
                out.ux(i, j) = (f(i, j) - f(i - 1, j)) / hx;
        for (int j = 1; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                out.uy(i, j) = (f(i, j) - f(i, j - 1)) / hy;
        // wall faces stay zero: homogeneous Neumann
    }
    return out;
}

ScalarField divergence(const VectorField& v) {
    const Grid& g = v.grid();
    ScalarField out(g);
    const double hx = g.hx(), hy = g.hy();
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            out(i, j) = (v.ux(i + 1, j) - v.ux(i, j)) / hx +
                        (v.uy(i, j + 1) - v.uy(i, j)) / hy;
    return out;
}

void to_centers(const VectorField& v, ScalarField& cx, ScalarField& cy) {
    const Grid& g = v.grid();
    cx = ScalarField(g);
    cy = ScalarField(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            cx(i, j) = 0.5 * (v.ux(i, j) + v.ux(i + 1, j));
            cy(i, j) = 0.5 * (v.uy(i, j) + v.uy(i, j + 1));
        }
}

// ---- advection ---------------------------------------------------------------

namespace {

/// Scratch interpolants for the skew advection operator.
struct AdvScratch {
    // cell-center averages of x-components / y-components
    std::vector<double> ucx, vcx;  // nx*ny, u_x and v_x at centers
    std::vector<double> ucy, vcy;  // nx*ny, u_y and v_y at centers
    // corner averages ((nx+1)*(ny+1))
    std::vector<double> uyc, vxc;  // u_y and v_x at corners
    std::vector<double> uxc, vyc;  // u_x and v_y at corners
};

void build_scratch(const VectorField& u, const VectorField& v, AdvScratch& s) {
    const Grid& g = u.grid();
    const int nx = g.nx, ny = g.ny;
    const bool per = g.periodic();
    s.ucx.resize(static_cast<std::size_t>(nx) * ny);
    s.vcx.resize(s.ucx.size());
    s.ucy.resize(s.ucx.size());
    s.vcy.resize(s.ucx.size());
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const std::size_t k = static_cast<std::size_t>(j) * nx + i;
            s.ucx[k] = 0.5 * (u.ux(i, j) + u.ux(i + 1, j));
            s.vcx[k] = 0.5 * (v.ux(i, j) + v.ux(i + 1, j));
            s.ucy[k] = 0.5 * (u.uy(i, j) + u.uy(i, j + 1));
            s.vcy[k] = 0.5 * (v.uy(i, j) + v.uy(i, j + 1));
        }

    const int cw = nx + 1;
    s.uyc.assign(static_cast<std::size_t>(cw) * (ny + 1), 0.0);
    s.vxc.assign(s.uyc.size(), 0.0);
    s.uxc.assign(s.uyc.size(), 0.0);
    s.vyc.assign(s.uyc.size(), 0.0);
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) {
            const std::size_t k = static_cast<std::size_t>(j) * cw + i;
            if (per) {
                const int im = wrap_idx(i - 1, nx), jm = wrap_idx(j - 1, ny);
                const int iw = wrap_idx(i, nx), jw = wrap_idx(j, ny);
                s.uyc[k] = 0.5 * (u.uy(im, jw) + u.uy(iw, jw));
                s.vxc[k] = 0.5 * (v.ux(iw, jm) + v.ux(iw, jw));
                s.uxc[k] = 0.5 * (u.ux(iw, jm) + u.ux(iw, jw));
                s.vyc[k] = 0.5 * (v.uy(im, jw) + v.uy(iw, jw));
            } else {
                // wall corners take the no-slip wall value 0
                s.uyc[k] = (i == 0 || i == nx) ? 0.0
                           : 0.5 * (u.uy(i - 1, j) + u.uy(i, j));
                s.vxc[k] = (j == 0 || j == ny) ? 0.0
                           : 0.5 * (v.ux(i, j - 1) + v.ux(i, j));
                s.uxc[k] = (j == 0 || j == ny) ? 0.0
                           : 0.5 * (u.ux(i, j - 1) + u.ux(i, j));
                s.vyc[k] = (i == 0 || i == nx) ? 0.0
                           : 0.5 * (v.uy(i - 1, j) + v.uy(i, j));
            }
        }
}

}  // namespace

VectorField advect_velocity(const VectorField& u, const VectorField& v) {
    // Skew average of the divergence form and the matched advective form.
    // The advective form averages the products u * (face difference of v),
    // which makes <Adv(u,v), w> = -<Div(u,w), v> a pure telescoping identity;
    // hence <A(u)v, w> = -<A(u)w, v> for every u, and advection never
    // creates kinetic energy.
    require_same_grid(u.grid(), v.grid(), "advect_velocity");
    const Grid& g = u.grid();
    const int nx = g.nx, ny = g.ny;
    const bool per = g.periodic();
    const double hx = g.hx(), hy = g.hy();
    const int cw = nx + 1;

    AdvScratch s;
    build_scratch(u, v, s);
    auto C = [&](const std::vector<double>& a, int i, int j) {
        return a[static_cast<std::size_t>(j) * nx + i];
    };
    auto K = [&](const std::vector<double>& a, int i, int j) {
        return a[static_cast<std::size_t>(j) * cw + i];
    };
    // raw face differences of v (periodic wrap; wall terms multiply zero)
    auto dxvx = [&](int i, int j) {  // at center (i,j)
        return (v.ux(i + 1, j) - v.ux(i, j)) / hx;
    };
    auto dyvx = [&](int i, int j) {  // at corner (i,j), j in [1, ny-1] box
        const int jm = per ? wrap_idx(j - 1, ny) : j - 1;
        return (v.ux(i, per ? wrap_idx(j, ny) : j) - v.ux(i, jm)) / hy;
    };
    auto dyvy = [&](int i, int j) {  // at center (i,j)
        return (v.uy(i, j + 1) - v.uy(i, j)) / hy;
    };
    auto dxvy = [&](int i, int j) {  // at corner (i,j), i in [1, nx-1] box
        const int im = per ? wrap_idx(i - 1, nx) : i - 1;
        return (v.uy(per ? wrap_idx(i, nx) : i, j) - v.uy(im, j)) / hx;
    };

    VectorField out(g);

    // x-faces (box: interior faces only, walls pinned)
    for (int j = 0; j < ny; ++j)
        for (int i = per ? 0 : 1; i < nx; ++i) {
            const int im = per ? wrap_idx(i - 1, nx) : i - 1;
            const double div_x = (C(s.ucx, i, j) * C(s.vcx, i, j) -
                                  C(s.ucx, im, j) * C(s.vcx, im, j)) / hx +
                                 (K(s.uyc, i, j + 1) * K(s.vxc, i, j + 1) -
                                  K(s.uyc, i, j) * K(s.vxc, i, j)) / hy;
            double adv_x = 0.5 * (C(s.ucx, im, j) * dxvx(im, j) +
                                  C(s.ucx, i, j) * dxvx(i, j));
            const double uy_lo = K(s.uyc, i, j);
            const double uy_hi = K(s.uyc, i, j + 1);
            if (per || j > 0) adv_x += 0.5 * uy_lo * dyvx(i, j);
            if (per || j + 1 < ny) adv_x += 0.5 * uy_hi * dyvx(i, j + 1);
            out.ux(i, j) = 0.5 * (div_x + adv_x);
        }

    // y-faces
    for (int j = per ? 0 : 1; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const int jm = per ? wrap_idx(j - 1, ny) : j - 1;
            const double div_y = (C(s.ucy, i, j) * C(s.vcy, i, j) -
                                  C(s.ucy, i, jm) * C(s.vcy, i, jm)) / hy +
                                 (K(s.uxc, i + 1, j) * K(s.vyc, i + 1, j) -
                                  K(s.uxc, i, j) * K(s.vyc, i, j)) / hx;
            double adv_y = 0.5 * (C(s.ucy, i, jm) * dyvy(i, jm) +
                                  C(s.ucy, i, j) * dyvy(i, j));
            const double ux_lo = K(s.uxc, i, j);
            const double ux_hi = K(s.uxc, i + 1, j);
            if (per || i > 0) adv_y += 0.5 * ux_lo * dxvy(i, j);
            if (per || i + 1 < nx) adv_y += 0.5 * ux_hi * dxvy(i + 1, j);
            out.uy(i, j) = 0.5 * (div_y + adv_y);
        }

    out.enforce_bc();
    return out;
}

ScalarField advect_scalar(const VectorField& u, const ScalarField& phi) {
    require_same_grid(u.grid(), phi.grid(), "advect_scalar");
    const Grid& g = u.grid();
    const int nx = g.nx, ny = g.ny;
    const bool per = g.periodic();
    const double hx = g.hx(), hy = g.hy();

    // face fluxes u * phibar
    std::vector<double> fx(static_cast<std::size_t>(nx + 1) * ny, 0.0);
    std::vector<double> fy(static_cast<std::size_t>(nx) * (ny + 1), 0.0);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i <= nx; ++i) {
            if (!per && (i == 0 || i == nx)) continue;  // wall flux zero
            const double pb = per ? 0.5 * (phi.wrap(i - 1, j) + phi.wrap(i, j))
                                  : 0.5 * (phi(i - 1, j) + phi(i, j));
            fx[static_cast<std::size_t>(j) * (nx + 1) + i] = u.ux(i, j) * pb;
        }
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i < nx; ++i) {
            if (!per && (j == 0 || j == ny)) continue;
            const double pb = per ? 0.5 * (phi.wrap(i, j - 1) + phi.wrap(i, j))
                                  : 0.5 * (phi(i, j - 1) + phi(i, j));
            fy[static_cast<std::size_t>(j) * nx + i] = u.uy(i, j) * pb;
        }

    ScalarField out(g);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const std::size_t kx = static_cast<std::size_t>(j) * (nx + 1) + i;
            const std::size_t ky = static_cast<std::size_t>(j) * nx + i;
            out(i, j) = (fx[kx + 1] - fx[kx]) / hx +
                        (fy[ky + nx] - fy[ky]) / hy;
        }
    return out;
}

double trilinear_b(const VectorField& u, const VectorField& v, const VectorField& w) {
    require_same_grid(u.grid(), v.grid(), "trilinear_b");
    require_same_grid(u.grid(), w.grid(), "trilinear_b");
    const VectorField av = advect_velocity(u, v);
    const VectorField aw = advect_velocity(u, w);
    return 0.5 * (dot(av, w) - dot(aw, v));
}

// ---- deterministic random fields ---------------------------------------------

ScalarField random_smooth(const Grid& g, Rng& rng, int kmax, double amp) {
    ScalarField f(g);
    const double tx = 2.0 * std::numbers::pi / g.lx;
    const double ty = 2.0 * std::numbers::pi / g.ly;
    for (int p = 0; p <= kmax; ++p)
        for (int q = 0; q <= kmax; ++q) {
            if (p == 0 && q == 0) continue;
            const double a = rng.normal();
            const double phx = rng.uniform(0.0, 2.0 * std::numbers::pi);
            const double phy = rng.uniform(0.0, 2.0 * std::numbers::pi);
            if (g.periodic()) {
                for (int j = 0; j < g.ny; ++j)
                    for (int i = 0; i < g.nx; ++i)
                        f(i, j) += a * std::cos(p * tx * g.xc(i) + phx) *
                                   std::cos(q * ty * g.yc(j) + phy);
            } else {
                // Neumann-compatible cosines (random phases would break walls)
                for (int j = 0; j < g.ny; ++j)
                    for (int i = 0; i < g.nx; ++i)
                        f(i, j) += a *
                                   std::cos(p * std::numbers::pi * g.xc(i) / g.lx) *
                                   std::cos(q * std::numbers::pi * g.yc(j) / g.ly);
            }
        }
    const double m = mean(f);
    f += -m;
    const double mx = max_abs(f);
    if (mx > 0.0) f *= amp / mx;
    return f;
}

VectorField random_solenoidal(const Grid& g, Rng& rng, int kmax, double amp) {
    // corner stream function table, (nx+1) x (ny+1)
    const int nx = g.nx, ny = g.ny;
    std::vector<double> psi(static_cast<std::size_t>(nx + 1) * (ny + 1), 0.0);
    auto P = [&](int i, int j) -> double& {
        return psi[static_cast<std::size_t>(j) * (nx + 1) + i];
    };

    const double tx = 2.0 * std::numbers::pi / g.lx;
    const double ty = 2.0 * std::numbers::pi / g.ly;
    for (int p = 1; p <= kmax; ++p)
        for (int q = 1; q <= kmax; ++q) {
            const double a = rng.normal();
            const double phx = rng.uniform(0.0, 2.0 * std::numbers::pi);
            const double phy = rng.uniform(0.0, 2.0 * std::numbers::pi);
            if (g.periodic()) {
                for (int j = 0; j <= ny; ++j)
                    for (int i = 0; i <= nx; ++i)
                        P(i, j) += a * std::cos(p * tx * g.xf(wrap_idx(i, nx)) + phx) *
                                   std::cos(q * ty * g.yf(wrap_idx(j, ny)) + phy);
            } else {
                // vanishes on all walls -> u.n = 0 exactly
                for (int j = 0; j <= ny; ++j)
                    for (int i = 0; i <= nx; ++i)
                        P(i, j) += a * std::sin(p * std::numbers::pi * g.xf(i) / g.lx) *
                                   std::sin(q * std::numbers::pi * g.yf(j) / g.ly);
            }
        }

    VectorField v(g);
    const double hx = g.hx(), hy = g.hy();
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i <= nx; ++i)
            v.ux(i, j) = (P(i, j + 1) - P(i, j)) / hy;
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i < nx; ++i)
            v.uy(i, j) = -(P(i + 1, j) - P(i, j)) / hx;
    v.enforce_bc();

    double mx = norms(v).linf;
    if (mx > 0.0) v *= amp / mx;
    return v;
}

}  // namespace nlchns
