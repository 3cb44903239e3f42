#include "nlchns/elliptic.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "nlchns/errors.hpp"
#include "nlchns/ops.hpp"

namespace nlchns {

namespace {

constexpr double pi = std::numbers::pi;

/// Corner sampling of the viscosity: mean of the adjacent cells, wrapping on
/// the torus and truncating to the existing cells at walls.
std::vector<double> corner_viscosity(const ScalarField& nu) {
    const Grid& g = nu.grid();
    std::vector<double> out(static_cast<std::size_t>(g.nx + 1) * (g.ny + 1));
    auto at = [&](int i, int j) -> double& {
        return out[static_cast<std::size_t>(j) * (g.nx + 1) + i];
    };
    if (g.periodic()) {
        for (int j = 0; j <= g.ny; ++j)
            for (int i = 0; i <= g.nx; ++i)
                at(i, j) = 0.25 * (nu.wrap(i - 1, j - 1) + nu.wrap(i, j - 1) +
                                   nu.wrap(i - 1, j) + nu.wrap(i, j));
    } else {
        for (int j = 0; j <= g.ny; ++j)
            for (int i = 0; i <= g.nx; ++i) {
                double sum = 0.0;
                int cnt = 0;
                for (int dj = -1; dj <= 0; ++dj)
                    for (int di = -1; di <= 0; ++di) {
                        const int ci = i + di, cj = j + dj;
                        if (ci >= 0 && ci < g.nx && cj >= 0 && cj < g.ny) {
                            sum += nu(ci, cj);
                            ++cnt;
                        }
                    }
                at(i, j) = sum / cnt;
            }
    }
    return out;
}

struct StrainData {
    // center strains
    std::vector<double> dxx, dyy;  // nx*ny
    // corner cross strain and quadrature weight
    std::vector<double> dxy, cw;  // (nx+1)*(ny+1)
};

/// Normal strains at centers and the cross strain at corners, with no-slip
/// ghosts doubling the one-sided wall derivative in box mode.
StrainData strains(const VectorField& u) {
    const Grid& g = u.grid();
    const double hx = g.hx(), hy = g.hy();
    const bool per = g.periodic();
    StrainData s;
    s.dxx.resize(static_cast<std::size_t>(g.nx) * g.ny);
    s.dyy.resize(s.dxx.size());
    s.dxy.assign(static_cast<std::size_t>(g.nx + 1) * (g.ny + 1), 0.0);
    s.cw.assign(s.dxy.size(), 0.0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t k = static_cast<std::size_t>(j) * g.nx + i;
            s.dxx[k] = (u.ux(i + 1, j) - u.ux(i, j)) / hx;
            s.dyy[k] = (u.uy(i, j + 1) - u.uy(i, j)) / hy;
        }
    auto cidx = [&](int i, int j) {
        return static_cast<std::size_t>(j) * (g.nx + 1) + i;
    };
    const int imax = per ? g.nx - 1 : g.nx;
    const int jmax = per ? g.ny - 1 : g.ny;
    for (int j = 0; j <= jmax; ++j)
        for (int i = 0; i <= imax; ++i) {
            double dyux, dxuy;
            if (per) {
                const int jm = (j - 1 + g.ny) % g.ny;
                const int im = (i - 1 + g.nx) % g.nx;
                dyux = (u.ux(i, j) - u.ux(i, jm)) / hy;
                dxuy = (u.uy(i, j) - u.uy(im, j)) / hx;
            } else {
                if (j == 0)
                    dyux = 2.0 * u.ux(i, 0) / hy;
                else if (j == g.ny)
                    dyux = -2.0 * u.ux(i, g.ny - 1) / hy;
                else
                    dyux = (u.ux(i, j) - u.ux(i, j - 1)) / hy;
                if (i == 0)
                    dxuy = 2.0 * u.uy(0, j) / hx;
                else if (i == g.nx)
                    dxuy = -2.0 * u.uy(g.nx - 1, j) / hx;
                else
                    dxuy = (u.uy(i, j) - u.uy(i - 1, j)) / hx;
            }
            s.dxy[cidx(i, j)] = 0.5 * (dyux + dxuy);
            double w = 1.0;
            if (!per) {
                if (i == 0 || i == g.nx) w *= 0.5;
                if (j == 0 || j == g.ny) w *= 0.5;
            }
            s.cw[cidx(i, j)] = w;
        }
    return s;
}

}  // namespace

double viscous_dissipation(const VectorField& u, const ScalarField& nu_center) {
    require_same_grid(u.grid(), nu_center.grid(), "viscous_dissipation");
    const Grid& g = u.grid();
    const StrainData s = strains(u);
    const std::vector<double> nuk = corner_viscosity(nu_center);
    double acc = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t k = static_cast<std::size_t>(j) * g.nx + i;
            acc += 2.0 * nu_center(i, j) *
                   (s.dxx[k] * s.dxx[k] + s.dyy[k] * s.dyy[k]);
        }
    const int imax = g.periodic() ? g.nx - 1 : g.nx;
    const int jmax = g.periodic() ? g.ny - 1 : g.ny;
    for (int j = 0; j <= jmax; ++j)
        for (int i = 0; i <= imax; ++i) {
            const std::size_t c = static_cast<std::size_t>(j) * (g.nx + 1) + i;
            acc += 4.0 * nuk[c] * s.dxy[c] * s.dxy[c] * s.cw[c];
        }
    return acc * g.cell_area();
}

VectorField viscous_force(const VectorField& u, const ScalarField& nu_center) {
    require_same_grid(u.grid(), nu_center.grid(), "viscous_force");
    const Grid& g = u.grid();
    const double hx = g.hx(), hy = g.hy();
    const bool per = g.periodic();
    const StrainData s = strains(u);
    const std::vector<double> nuk = corner_viscosity(nu_center);
    VectorField v(g);

    // scatter the center stresses through the transpose of the center gather
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t k = static_cast<std::size_t>(j) * g.nx + i;
            const double sxx = 2.0 * nu_center(i, j) * s.dxx[k];
            const double syy = 2.0 * nu_center(i, j) * s.dyy[k];
            const int ip = per ? (i + 1) % g.nx : i + 1;
            const int jp = per ? (j + 1) % g.ny : j + 1;
            // divergence of the stress: face i sees +stress from cell i and
            // -stress from cell i-1
            v.ux(i, j) += sxx / hx;
            v.ux(ip, j) -= sxx / hx;
            v.uy(i, j) += syy / hy;
            v.uy(i, jp) -= syy / hy;
        }

    // scatter the corner stresses through the transpose of the corner gather
    const int imax = per ? g.nx - 1 : g.nx;
    const int jmax = per ? g.ny - 1 : g.ny;
    for (int j = 0; j <= jmax; ++j)
        for (int i = 0; i <= imax; ++i) {
            const std::size_t c = static_cast<std::size_t>(j) * (g.nx + 1) + i;
            const double sxy = 4.0 * nuk[c] * s.cw[c] * s.dxy[c];
            if (per) {
                const int jm = (j - 1 + g.ny) % g.ny;
                const int im = (i - 1 + g.nx) % g.nx;
                v.ux(i, j) -= 0.5 * sxy / hy;
                v.ux(i, jm) += 0.5 * sxy / hy;
                v.uy(i, j) -= 0.5 * sxy / hx;
                v.uy(im, j) += 0.5 * sxy / hx;
            } else {
                // wall corners: the no-slip ghost doubles the derivative and
                // removes the opposite-side term
                if (j == 0)
                    v.ux(i, 0) -= sxy / hy;
                else if (j == g.ny)
                    v.ux(i, g.ny - 1) += sxy / hy;
                else {
                    v.ux(i, j) -= 0.5 * sxy / hy;
                    v.ux(i, j - 1) += 0.5 * sxy / hy;
                }
                if (i == 0)
                    v.uy(0, j) -= sxy / hx;
                else if (i == g.nx)
                    v.uy(g.nx - 1, j) += sxy / hx;
                else {
                    v.uy(i, j) -= 0.5 * sxy / hx;
                    v.uy(i - 1, j) += 0.5 * sxy / hx;
                }
            }
        }
    v.enforce_bc();
    return v;
}

// ---- spectral poisson ---------------------------------------------------------

struct SpectralPoisson::Impl {
    Grid g;
    bool per = true;
    // periodic path
    fftw_plan r2c = nullptr, c2r = nullptr;
    double* rbuf = nullptr;
    fftw_complex* cbuf = nullptr;
    // box path (2D DCT-II / DCT-III)
    fftw_plan dct_fwd = nullptr, dct_bwd = nullptr;
    std::vector<double> lam_x, lam_y;  // per-axis eigenvalues

    ~Impl() {
        if (r2c) fftw_destroy_plan(r2c);
        if (c2r) fftw_destroy_plan(c2r);
        if (dct_fwd) fftw_destroy_plan(dct_fwd);
        if (dct_bwd) fftw_destroy_plan(dct_bwd);
        if (rbuf) fftw_free(rbuf);
        if (cbuf) fftw_free(cbuf);
    }

    void load(const ScalarField& f) {
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                rbuf[static_cast<std::size_t>(j) * g.nx + i] = f(i, j);
    }

    ScalarField unload() const {
        ScalarField out(g);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                out(i, j) = rbuf[static_cast<std::size_t>(j) * g.nx + i];
        return out;
    }

    /// Transform, multiply coefficient (kx, ky) by gain(lam), transform back,
    /// normalize.
    template <class Gain>
    ScalarField filter(const ScalarField& f, Gain gain) {
        load(f);
        if (per) {
            fftw_execute(r2c);
            const int pcx = g.nx / 2 + 1;
            for (int ky = 0; ky < g.ny; ++ky)
                for (int kx = 0; kx < pcx; ++kx) {
                    const double lam = lam_x[kx] + lam_y[ky];
                    const double gv = gain(lam);
                    fftw_complex& z =
                        cbuf[static_cast<std::size_t>(ky) * pcx + kx];
                    z[0] *= gv;
                    z[1] *= gv;
                }
            fftw_execute(c2r);
            const double norm = 1.0 / (static_cast<double>(g.nx) * g.ny);
            for (std::size_t k = 0; k < static_cast<std::size_t>(g.nx) * g.ny;
                 ++k)
                rbuf[k] *= norm;
        } else {
            fftw_execute(dct_fwd);
            for (int ky = 0; ky < g.ny; ++ky)
                for (int kx = 0; kx < g.nx; ++kx) {
                    const double lam = lam_x[kx] + lam_y[ky];
                    rbuf[static_cast<std::size_t>(ky) * g.nx + kx] *= gain(lam);
                }
            fftw_execute(dct_bwd);
            const double norm = 1.0 / (4.0 * g.nx * g.ny);
            for (std::size_t k = 0; k < static_cast<std::size_t>(g.nx) * g.ny;
                 ++k)
                rbuf[k] *= norm;
        }
        return unload();
    }
};

SpectralPoisson::SpectralPoisson(const Grid& g) : impl_(std::make_unique<Impl>()) {
    Impl& im = *impl_;
    im.g = g;
    im.per = g.periodic();
    const std::size_t n = static_cast<std::size_t>(g.nx) * g.ny;
    im.rbuf = fftw_alloc_real(n);
    im.lam_x.resize(g.nx);
    im.lam_y.resize(g.ny);
    if (im.per) {
        im.cbuf = fftw_alloc_complex(static_cast<std::size_t>(g.ny) *
                                     (g.nx / 2 + 1));
        im.r2c = fftw_plan_dft_r2c_2d(g.ny, g.nx, im.rbuf, im.cbuf,
                                      FFTW_ESTIMATE);
        im.c2r = fftw_plan_dft_c2r_2d(g.ny, g.nx, im.cbuf, im.rbuf,
                                      FFTW_ESTIMATE);
        if (!im.r2c || !im.c2r) throw Error("fftw plan creation failed");
        for (int k = 0; k < g.nx; ++k)
            im.lam_x[k] =
                2.0 / (g.hx() * g.hx()) * (1.0 - std::cos(2.0 * pi * k / g.nx));
        for (int k = 0; k < g.ny; ++k)
            im.lam_y[k] =
                2.0 / (g.hy() * g.hy()) * (1.0 - std::cos(2.0 * pi * k / g.ny));
    } else {
        im.dct_fwd = fftw_plan_r2r_2d(g.ny, g.nx, im.rbuf, im.rbuf,
                                      FFTW_REDFT10, FFTW_REDFT10,
                                      FFTW_ESTIMATE);
        im.dct_bwd = fftw_plan_r2r_2d(g.ny, g.nx, im.rbuf, im.rbuf,
                                      FFTW_REDFT01, FFTW_REDFT01,
                                      FFTW_ESTIMATE);
        if (!im.dct_fwd || !im.dct_bwd) throw Error("fftw plan creation failed");
        for (int k = 0; k < g.nx; ++k)
            im.lam_x[k] =
                2.0 / (g.hx() * g.hx()) * (1.0 - std::cos(pi * k / g.nx));
        for (int k = 0; k < g.ny; ++k)
            im.lam_y[k] =
                2.0 / (g.hy() * g.hy()) * (1.0 - std::cos(pi * k / g.ny));
    }
}

SpectralPoisson::~SpectralPoisson() = default;
SpectralPoisson::SpectralPoisson(SpectralPoisson&&) noexcept = default;
SpectralPoisson& SpectralPoisson::operator=(SpectralPoisson&&) noexcept =
    default;

const Grid& SpectralPoisson::grid() const { return impl_->g; }

ScalarField SpectralPoisson::apply(const ScalarField& f) const {
    require_same_grid(impl_->g, f.grid(), "poisson apply");
    ScalarField out = divergence(gradient(f));
    out *= -1.0;
    return out;
}

ScalarField SpectralPoisson::inverse(const ScalarField& f) const {
    require_same_grid(impl_->g, f.grid(), "poisson inverse");
    return impl_->filter(
        f, [](double lam) { return lam > 0.0 ? 1.0 / lam : 0.0; });
}

ScalarField SpectralPoisson::helmholtz_inverse(const ScalarField& f,
                                               double kappa) const {
    require_same_grid(impl_->g, f.grid(), "helmholtz inverse");
    return impl_->filter(
        f, [kappa](double lam) { return 1.0 / (1.0 + kappa * lam); });
}

double SpectralPoisson::vdual_norm(const ScalarField& f) const {
    require_same_grid(impl_->g, f.grid(), "vdual_norm");
    const double m = mean(f);
    ScalarField u = inverse(f);  // the k = 0 / constant component is dropped
    return norms(gradient(u)).l2 + std::abs(m);
}

double SpectralPoisson::symbol(int kx, int ky) const {
    const Impl& im = *impl_;
    kx = ((kx % im.g.nx) + im.g.nx) % im.g.nx;
    ky = ((ky % im.g.ny) + im.g.ny) % im.g.ny;
    return im.lam_x[kx] + im.lam_y[ky];
}

// ---- incompressible projection -------------------------------------------------

LerayProjector::LerayProjector(const Grid& g) : poisson_(g) {}

VectorField LerayProjector::project(const VectorField& v) const {
    ScalarField dump(poisson_.grid());
    return project(v, dump);
}

VectorField LerayProjector::project(const VectorField& v,
                                    ScalarField& pressure) const {
    require_same_grid(poisson_.grid(), v.grid(), "leray project");
    VectorField out = v;
    out.enforce_bc();  // constrained wall normals are zero by definition
    ScalarField p = poisson_.inverse(divergence(out));
    out += gradient(p);
    p *= -1.0;
    pressure = std::move(p);
    return out;
}

// ---- conjugate gradients --------------------------------------------------------

namespace {

/// Plain preconditioned CG over ScalarField.
template <class Op, class Prec>
ScalarField cg_scalar(Op&& op, Prec&& prec, const ScalarField& rhs,
                      ScalarField x0, double tol, int max_iter,
                      const char* where, int* iterations) {
    ScalarField x = std::move(x0);
    ScalarField r = rhs;
    {
        ScalarField ax = op(x);
        r -= ax;
    }
    const double rhs_norm = std::sqrt(dot(rhs, rhs));
    const double stop = tol * std::max(rhs_norm, 1e-300);
    ScalarField z = prec(r);
    ScalarField p = z;
    double rz = dot(r, z);
    int it = 0;
    double rnorm = std::sqrt(dot(r, r));
    while (rnorm > stop) {
        if (it >= max_iter) throw NoConvergence(where, it, rnorm / rhs_norm);
        ScalarField ap = op(p);
        const double pap = dot(p, ap);
        if (!(pap > 0.0))
            throw NoConvergence(where, it, rnorm / rhs_norm);
        const double alpha = rz / pap;
        for (std::size_t k = 0; k < x.size(); ++k) {
            x.data()[k] += alpha * p.data()[k];
            r.data()[k] -= alpha * ap.data()[k];
        }
        z = prec(r);
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t k = 0; k < p.size(); ++k)
            p.data()[k] = z.data()[k] + beta * p.data()[k];
        rnorm = std::sqrt(dot(r, r));
        ++it;
    }
    if (iterations) *iterations = it;
    return x;
}

/// Plain preconditioned CG over VectorField.
template <class Op, class Prec>
VectorField cg_vector(Op&& op, Prec&& prec, const VectorField& rhs,
                      VectorField x0, double tol, int max_iter,
                      const char* where, int* iterations) {
    VectorField x = std::move(x0);
    VectorField r = rhs;
    {
        VectorField ax = op(x);
        r -= ax;
    }
    const double rhs_norm = std::sqrt(dot(rhs, rhs));
    const double stop = tol * std::max(rhs_norm, 1e-300);
    VectorField z = prec(r);
    VectorField p = z;
    double rz = dot(r, z);
    int it = 0;
    double rnorm = std::sqrt(dot(r, r));
    while (rnorm > stop) {
        if (it >= max_iter) throw NoConvergence(where, it, rnorm / rhs_norm);
        VectorField ap = op(p);
        const double pap = dot(p, ap);
        if (!(pap > 0.0))
            throw NoConvergence(where, it, rnorm / rhs_norm);
        const double alpha = rz / pap;
        for (std::size_t k = 0; k < x.ux_size(); ++k) {
            x.ux_data()[k] += alpha * p.ux_data()[k];
            r.ux_data()[k] -= alpha * ap.ux_data()[k];
        }
        for (std::size_t k = 0; k < x.uy_size(); ++k) {
            x.uy_data()[k] += alpha * p.uy_data()[k];
            r.uy_data()[k] -= alpha * ap.uy_data()[k];
        }
        z = prec(r);
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t k = 0; k < p.ux_size(); ++k)
            p.ux_data()[k] = z.ux_data()[k] + beta * p.ux_data()[k];
        for (std::size_t k = 0; k < p.uy_size(); ++k)
            p.uy_data()[k] = z.uy_data()[k] + beta * p.uy_data()[k];
        rnorm = std::sqrt(dot(r, r));
        ++it;
    }
    if (iterations) *iterations = it;
    return x;
}

}  // namespace

// ---- viscous solver -------------------------------------------------------------

ViscousSolver::ViscousSolver(const Grid& g, double tol, int max_iter)
    : grid_(g), tol_(tol), max_iter_(max_iter) {}

VectorField ViscousSolver::solve(const VectorField& rhs,
                                 const ScalarField& nu_center,
                                 double dt) const {
    require_same_grid(grid_, rhs.grid(), "viscous solve");
    const Grid& g = grid_;
    VectorField b = rhs;
    b.enforce_bc();

    // Jacobi diagonal of (I + dt K) from the interior stencil; boundary rows
    // only approximate, which a preconditioner is allowed to be
    const std::vector<double> nuk = corner_viscosity(nu_center);
    VectorField diag(g);
    const double hx2 = g.hx() * g.hx(), hy2 = g.hy() * g.hy();
    auto nuk_at = [&](int i, int j) {
        return nuk[static_cast<std::size_t>(j) * (g.nx + 1) + i];
    };
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) {
            const double nl = nu_center.wrap(i - 1, j);
            const double nr = g.periodic() ? nu_center.wrap(i, j)
                                           : nu_center(std::min(i, g.nx - 1), j);
            diag.ux(i, j) = 1.0 + dt * (2.0 * (nl + nr) / hx2 +
                                        (nuk_at(std::min(i, g.nx), j) +
                                         nuk_at(std::min(i, g.nx), j + 1)) /
                                            hy2);
        }
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double nb = nu_center.wrap(i, j - 1);
            const double nt = g.periodic() ? nu_center.wrap(i, j)
                                           : nu_center(i, std::min(j, g.ny - 1));
            diag.uy(i, j) = 1.0 + dt * (2.0 * (nb + nt) / hy2 +
                                        (nuk_at(i, std::min(j, g.ny)) +
                                         nuk_at(i + 1, std::min(j, g.ny))) /
                                            hx2);
        }

    auto op = [&](const VectorField& x) {
        VectorField kx = viscous_force(x, nu_center);
        kx *= -dt;
        kx += x;
        kx.enforce_bc();
        return kx;
    };
    auto prec = [&](const VectorField& r) {
        VectorField z = r;
        for (std::size_t k = 0; k < z.ux_size(); ++k)
            z.ux_data()[k] /= diag.ux_data()[k];
        for (std::size_t k = 0; k < z.uy_size(); ++k)
            z.uy_data()[k] /= diag.uy_data()[k];
        z.enforce_bc();
        return z;
    };
    VectorField x = cg_vector(op, prec, b, b, tol_, max_iter_, "viscous solve",
                              &last_iterations_);
    x.enforce_bc();
    return x;
}

// ---- variable-coefficient helmholtz solves --------------------------------------

ScalarField solve_helmholtz_center(const SpectralPoisson& poisson,
                                   const ScalarField& c, double kappa,
                                   const ScalarField& rhs, double tol,
                                   int max_iter, int* iterations) {
    const Grid& g = poisson.grid();
    require_same_grid(g, c.grid(), "helmholtz center");
    require_same_grid(g, rhs.grid(), "helmholtz center");

    // substitute z = c phi:  z / c + kappa Bn z = rhs  (SPD)
    double inv_c_mean = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
        if (!(c.data()[k] > 0.0))
            throw ConfigError("helmholtz center: coefficient must be positive");
        inv_c_mean += 1.0 / c.data()[k];
    }
    inv_c_mean /= static_cast<double>(c.size());

    auto op = [&](const ScalarField& z) {
        ScalarField az = poisson.apply(z);
        az *= kappa;
        for (std::size_t k = 0; k < az.size(); ++k)
            az.data()[k] += z.data()[k] / c.data()[k];
        return az;
    };
    auto prec = [&](const ScalarField& r) {
        ScalarField z = poisson.helmholtz_inverse(r, kappa / inv_c_mean);
        z *= 1.0 / inv_c_mean;
        return z;
    };
    ScalarField z0 = rhs;
    for (std::size_t k = 0; k < z0.size(); ++k) z0.data()[k] *= c.data()[k];
    ScalarField z = cg_scalar(op, prec, rhs, std::move(z0), tol, max_iter,
                              "helmholtz center", iterations);
    for (std::size_t k = 0; k < z.size(); ++k) z.data()[k] /= c.data()[k];
    return z;
}

ScalarField solve_helmholtz_face(const SpectralPoisson& poisson,
                                 const VectorField& bface, double dt,
                                 const ScalarField& rhs, double tol,
                                 int max_iter, int* iterations) {
    const Grid& g = poisson.grid();
    require_same_grid(g, bface.grid(), "helmholtz face");
    require_same_grid(g, rhs.grid(), "helmholtz face");

    double bbar = 0.0;
    {
        double s = 0.0;
        std::size_t n = 0;
        for (std::size_t k = 0; k < bface.ux_size(); ++k) s += bface.ux_data()[k];
        n += bface.ux_size();
        for (std::size_t k = 0; k < bface.uy_size(); ++k) s += bface.uy_data()[k];
        n += bface.uy_size();
        bbar = s / static_cast<double>(n);
        if (!(bbar > 0.0))
            throw ConfigError("helmholtz face: coefficients must be positive "
                              "on average");
    }

    auto op = [&](const ScalarField& w) {
        VectorField flux = gradient(w);
        for (std::size_t k = 0; k < flux.ux_size(); ++k)
            flux.ux_data()[k] *= bface.ux_data()[k];
        for (std::size_t k = 0; k < flux.uy_size(); ++k)
            flux.uy_data()[k] *= bface.uy_data()[k];
        flux.enforce_bc();
        ScalarField out = divergence(flux);
        out *= -dt;
        out += w;
        return out;
    };
    auto prec = [&](const ScalarField& r) {
        return poisson.helmholtz_inverse(r, dt * bbar);
    };
    return cg_scalar(op, prec, rhs, rhs, tol, max_iter, "helmholtz face",
                     iterations);
}

}  // namespace nlchns
