#include "nlchns/kernel.hpp"

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

// ---- modified Bessel functions (Abramowitz & Stegun 9.8.x, |err| < 2e-7) ----

double bessel_i0(double x) {
    const double t = x / 3.75, t2 = t * t;
    return 1.0 + t2 * (3.5156229 + t2 * (3.0899424 + t2 * (1.2067492 +
           t2 * (0.2659732 + t2 * (0.0360768 + t2 * 0.0045813)))));
}

double bessel_i1(double x) {
    const double t = x / 3.75, t2 = t * t;
    return x * (0.5 + t2 * (0.87890594 + t2 * (0.51498869 + t2 * (0.15084934 +
           t2 * (0.02658733 + t2 * (0.00301532 + t2 * 0.00032411))))));
}

double bessel_k0(double x) {
    if (x <= 2.0) {
        const double t = x / 2.0, t2 = t * t;
        return -std::log(t) * bessel_i0(x) - 0.57721566 +
               t2 * (0.42278420 + t2 * (0.23069756 + t2 * (0.03488590 +
               t2 * (0.00262698 + t2 * (0.00010750 + t2 * 0.00000740)))));
    }
    const double s = 2.0 / x;
    return std::exp(-x) / std::sqrt(x) *
           (1.25331414 + s * (-0.07832358 + s * (0.02189568 + s * (-0.01062446 +
            s * (0.00587872 + s * (-0.00251540 + s * 0.00053208))))));
}

double bessel_k1(double x) {
    if (x <= 2.0) {
        const double t = x / 2.0, t2 = t * t;
        const double poly = 1.0 + t2 * (0.15443144 + t2 * (-0.67278579 +
            t2 * (-0.18156897 + t2 * (-0.01919402 + t2 * (-0.00110404 +
            t2 * -0.00004686)))));
        return std::log(t) * bessel_i1(x) + poly / x;
    }
    const double s = 2.0 / x;
    return std::exp(-x) / std::sqrt(x) *
           (1.25331414 + s * (0.23498619 + s * (-0.03655620 + s * (0.01504268 +
            s * (-0.00780353 + s * (0.00325614 + s * -0.00068245))))));
}

}  // namespace

// ---- kernel profiles ---------------------------------------------------------

void KernelSpec::validate() const {
    if (!(scale > 0.0)) throw ConfigError("kernel: scale must be positive");
    switch (family) {
        case KernelFamily::Gaussian:
            if (!(eps > 0.0)) throw ConfigError("kernel: gaussian eps must be positive");
            break;
        case KernelFamily::TopHat:
            if (!(delta > 0.0)) throw ConfigError("kernel: tophat delta must be positive");
            if (amp < 0.0) throw ConfigError("kernel: tophat amplitude must be >= 0");
            break;
        case KernelFamily::Newtonian:
            if (rho0 < 0.0) throw ConfigError("kernel: rho0 must be >= 0");
            break;
        case KernelFamily::Bessel:
            if (!(kappa > 0.0)) throw ConfigError("kernel: bessel kappa must be positive");
            if (rho0 < 0.0) throw ConfigError("kernel: rho0 must be >= 0");
            break;
    }
}

double KernelSpec::value(double r, double rho0_eff) const {
    switch (family) {
        case KernelFamily::Gaussian: {
            const double c = scale / (2.0 * pi * eps * eps);
            return c * std::exp(-0.5 * r * r / (eps * eps));
        }
        case KernelFamily::TopHat: {
            const double c = (amp > 0.0) ? amp : 1.0 / (pi * delta * delta);
            return (r <= delta) ? scale * c : 0.0;
        }
        case KernelFamily::Newtonian:
            return -scale / (2.0 * pi) * std::log(std::max(r, rho0_eff));
        case KernelFamily::Bessel:
            return scale / (2.0 * pi) * bessel_k0(kappa * std::max(r, rho0_eff));
    }
    return 0.0;
}

double KernelSpec::dvalue(double r, double rho0_eff) const {
    switch (family) {
        case KernelFamily::Gaussian: {
            const double c = scale / (2.0 * pi * eps * eps);
            return -r / (eps * eps) * c * std::exp(-0.5 * r * r / (eps * eps));
        }
        case KernelFamily::TopHat:
            throw ConfigError("kernel: tophat is not differentiable at its rim");
        case KernelFamily::Newtonian:
            return (r <= rho0_eff) ? 0.0 : -scale / (2.0 * pi * r);
        case KernelFamily::Bessel:
            return (r <= rho0_eff) ? 0.0
                                   : -scale * kappa / (2.0 * pi) * bessel_k1(kappa * r);
    }
    return 0.0;
}

// ---- convolution engine --------------------------------------------------------

struct ConvolutionPlan::Impl {
    Grid g;
    KernelSpec spec;
    double rho0_eff = 0.0;

    // transform geometry: periodic -> nx*ny, box -> (2nx)*(2ny)
    int px = 0, py = 0;        // real array dims (py rows, px fastest)
    int pcx = 0;               // complex row length px/2 + 1
    double inv_scale = 0.0;    // hx*hy / (px*py)

    fftw_plan fwd = nullptr;   // real_buf -> cplx_buf
    fftw_plan bwd = nullptr;   // cplx_buf -> real_buf
    double* real_buf = nullptr;
    fftw_complex* cplx_buf = nullptr;

    std::vector<double> khat;                // kernel transform (real part)
    std::vector<double> khat_im;             // zero: symmetric kernels are even
    std::vector<double> kxhat_re, kxhat_im;  // x-face-shifted dJ/dx transform
    std::vector<double> kyhat_re, kyhat_im;  // y-face-shifted dJ/dy transform
    bool have_grad = false;

    ScalarField a;
    VectorField grad_a;
    double a_min = 0.0, a_max = 0.0, a_star = 0.0, grad_l1 = 0.0;

    ~Impl() {
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
        if (real_buf) fftw_free(real_buf);
        if (cplx_buf) fftw_free(cplx_buf);
    }

    std::size_t ridx(int i, int j) const {
        return static_cast<std::size_t>(j) * px + i;
    }

    /// Minimal-image map of a physical offset onto the torus.
    static double min_image(double o, double period) {
        o -= period * std::floor(o / period + 0.5);
        return o;
    }

    /// Sample a kernel table on the offset lattice.  shift_x/shift_y move the
    /// sample points by half a cell (face-centered gradient tables).
    /// deriv: 0 -> J, 1 -> dJ/dx, 2 -> dJ/dy, 3 -> |J|.
    void sample_table(std::vector<double>& table, double shift_x, double shift_y,
                      int deriv) const {
        table.assign(static_cast<std::size_t>(px) * py, 0.0);
        const double hx = g.hx(), hy = g.hy();
        const bool per = g.periodic();
        // offset index ranges: periodic covers the torus once; box covers
        // [1-nx, nx] x [1-ny, ny] placed mod (2nx, 2ny).
        const int plo = per ? 0 : 1 - g.nx;
        const int phi_x = per ? px - 1 : g.nx;
        const int qlo = per ? 0 : 1 - g.ny;
        const int qhi_y = per ? py - 1 : g.ny;
        for (int q = qlo; q <= qhi_y; ++q)
            for (int p = plo; p <= phi_x; ++p) {
                double ox = p * hx - shift_x;
                double oy = q * hy - shift_y;
                if (per) {
                    ox = min_image(ox, g.lx);
                    oy = min_image(oy, g.ly);
                }
                const double r = std::hypot(ox, oy);
                double v = 0.0;
                switch (deriv) {
                    case 0: v = spec.value(r, rho0_eff); break;
                    case 3: v = std::abs(spec.value(r, rho0_eff)); break;
                    case 1:
                    case 2: {
                        if (r > 0.0) {
                            const double dj = spec.dvalue(r, rho0_eff);
                            v = dj * ((deriv == 1) ? ox : oy) / r;
                        }
                        break;
                    }
                }
                const int ip = (p % px + px) % px;
                const int iq = (q % py + py) % py;
                table[static_cast<std::size_t>(iq) * px + ip] = v;
            }
    }

    /// Forward-transform a sampled table into (re, im) arrays.
    void transform_table(const std::vector<double>& table, std::vector<double>& re,
                         std::vector<double>& im) {
        std::copy(table.begin(), table.end(), real_buf);
        fftw_execute(fwd);
        const std::size_t nc = static_cast<std::size_t>(py) * pcx;
        re.resize(nc);
        im.resize(nc);
        for (std::size_t k = 0; k < nc; ++k) {
            re[k] = cplx_buf[k][0];
            im[k] = cplx_buf[k][1];
        }
    }

    /// Load f (zero-padded in box mode), transform, multiply by the cached
    /// kernel transform, inverse-transform.  Result stays in real_buf.
    void apply(const ScalarField& f, const std::vector<double>& kre,
               const std::vector<double>& kim) {
        std::fill(real_buf, real_buf + static_cast<std::size_t>(px) * py, 0.0);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) real_buf[ridx(i, j)] = f(i, j);
        fftw_execute(fwd);
        const std::size_t nc = static_cast<std::size_t>(py) * pcx;
        for (std::size_t k = 0; k < nc; ++k) {
            const double fr = cplx_buf[k][0], fi = cplx_buf[k][1];
            cplx_buf[k][0] = kre[k] * fr - kim[k] * fi;
            cplx_buf[k][1] = kre[k] * fi + kim[k] * fr;
        }
        fftw_execute(bwd);
        const std::size_t nr = static_cast<std::size_t>(px) * py;
        for (std::size_t k = 0; k < nr; ++k) real_buf[k] *= inv_scale;
    }
};

ConvolutionPlan::ConvolutionPlan(const Grid& g, const KernelSpec& spec)
    : impl_(std::make_unique<Impl>()) {
    spec.validate();
    Impl& im = *impl_;
    im.g = g;
    im.spec = spec;
    im.rho0_eff = (spec.rho0 > 0.0) ? spec.rho0 : 2.0 * std::max(g.hx(), g.hy());

    const bool per = g.periodic();
    im.px = per ? g.nx : 2 * g.nx;
    im.py = per ? g.ny : 2 * g.ny;
    im.pcx = im.px / 2 + 1;
    im.inv_scale = g.cell_area() / (static_cast<double>(im.px) * im.py);

    im.real_buf = fftw_alloc_real(static_cast<std::size_t>(im.px) * im.py);
    im.cplx_buf = fftw_alloc_complex(static_cast<std::size_t>(im.py) * im.pcx);
    // FFTW_ESTIMATE keeps plan selection deterministic run to run.
    im.fwd = fftw_plan_dft_r2c_2d(im.py, im.px, im.real_buf, im.cplx_buf,
                                  FFTW_ESTIMATE);
    im.bwd = fftw_plan_dft_c2r_2d(im.py, im.px, im.cplx_buf, im.real_buf,
                                  FFTW_ESTIMATE);
    if (!im.fwd || !im.bwd) throw Error("fftw plan creation failed");

    // center kernel table + symmetry audit
    std::vector<double> table;
    im.sample_table(table, 0.0, 0.0, 0);
    {
        double ref = 0.0;
        for (double v : table) ref = std::max(ref, std::abs(v));
        for (int q = 0; q < im.py; ++q)
            for (int p = 0; p < im.px; ++p) {
                const int pn = (im.px - p) % im.px;
                const int qn = (im.py - q) % im.py;
                const double d =
                    std::abs(table[static_cast<std::size_t>(q) * im.px + p] -
                             table[static_cast<std::size_t>(qn) * im.px + pn]);
                if (d > 1e-12 * ref)
                    throw NonsymmetricKernel(
                        "kernel stencil violates J(x) = J(-x)");
            }
    }
    {
        std::vector<double> kim_roundoff;  // even table -> imaginary part ~ 0
        im.transform_table(table, im.khat, kim_roundoff);
        // exact symmetry in the spectral product: zero the roundoff-level
        // imaginary part of an even table
        im.khat_im.assign(im.khat.size(), 0.0);
    }

    // gradient tables (face-shifted), if the kernel allows them
    if (spec.differentiable()) {
        std::vector<double> tx, ty;
        im.sample_table(tx, 0.5 * g.hx(), 0.0, 1);
        im.sample_table(ty, 0.0, 0.5 * g.hy(), 2);
        im.transform_table(tx, im.kxhat_re, im.kxhat_im);
        im.transform_table(ty, im.kyhat_re, im.kyhat_im);
        im.have_grad = true;

        // |grad J| summed over the center offset lattice (L1 stat)
        double gl1 = 0.0;
        const double hx = g.hx(), hy = g.hy();
        const int plo = per ? 0 : 1 - g.nx;
        const int phi_x = per ? im.px - 1 : g.nx;
        const int qlo = per ? 0 : 1 - g.ny;
        const int qhi_y = per ? im.py - 1 : g.ny;
        for (int q = qlo; q <= qhi_y; ++q)
            for (int p = plo; p <= phi_x; ++p) {
                double ox = p * hx, oy = q * hy;
                if (per) {
                    ox = Impl::min_image(ox, g.lx);
                    oy = Impl::min_image(oy, g.ly);
                }
                const double r = std::hypot(ox, oy);
                if (r > 0.0) gl1 += std::abs(spec.dvalue(r, im.rho0_eff));
            }
        im.grad_l1 = gl1 * g.cell_area();
    }

    // a = J * 1 through the standard path
    ScalarField ones(g, 1.0);
    im.apply(ones, im.khat, im.khat_im);
    im.a = ScalarField(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) im.a(i, j) = im.real_buf[im.ridx(i, j)];
    im.a_min = im.a(0, 0);
    im.a_max = im.a(0, 0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            im.a_min = std::min(im.a_min, im.a(i, j));
            im.a_max = std::max(im.a_max, im.a(i, j));
        }
    if (im.a_min < -1e-12 * std::max(1.0, std::abs(im.a_max)))
        throw ConfigError("kernel: J*1 is negative somewhere (violates the "
                          "nonnegative-mass assumption)");

    // a* = sup_x int |J|: reuse the engine with the |J| table
    {
        std::vector<double> tabs;
        im.sample_table(tabs, 0.0, 0.0, 3);
        std::vector<double> are, aim;
        im.transform_table(tabs, are, aim);
        im.apply(ones, are, aim);
        double mx = 0.0;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                mx = std::max(mx, im.real_buf[im.ridx(i, j)]);
        im.a_star = mx;
    }

    // grad a = (grad J) * 1; exact zero on the torus.  Box mode uses the
    // face-shifted kernel tables when available, else a finite difference.
    im.grad_a = VectorField(g);
    if (!per) {
        if (im.have_grad) {
            im.apply(ones, im.kxhat_re, im.kxhat_im);
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i <= g.nx; ++i)
                    im.grad_a.ux(i, j) = im.real_buf[im.ridx(i, j)];
            im.apply(ones, im.kyhat_re, im.kyhat_im);
            for (int j = 0; j <= g.ny; ++j)
                for (int i = 0; i < g.nx; ++i)
                    im.grad_a.uy(i, j) = im.real_buf[im.ridx(i, j)];
        } else {
            im.grad_a = gradient(im.a);
        }
        im.grad_a.enforce_bc();
    }
}

ConvolutionPlan::~ConvolutionPlan() = default;
ConvolutionPlan::ConvolutionPlan(ConvolutionPlan&&) noexcept = default;
ConvolutionPlan& ConvolutionPlan::operator=(ConvolutionPlan&&) noexcept = default;

const Grid& ConvolutionPlan::grid() const { return impl_->g; }
const KernelSpec& ConvolutionPlan::spec() const { return impl_->spec; }
double ConvolutionPlan::rho0_eff() const { return impl_->rho0_eff; }
const ScalarField& ConvolutionPlan::a_field() const { return impl_->a; }
const VectorField& ConvolutionPlan::grad_a() const { return impl_->grad_a; }
double ConvolutionPlan::a_min() const { return impl_->a_min; }
double ConvolutionPlan::a_max() const { return impl_->a_max; }
double ConvolutionPlan::a_star() const { return impl_->a_star; }
double ConvolutionPlan::grad_l1() const { return impl_->grad_l1; }

ScalarField ConvolutionPlan::convolve(const ScalarField& f) const {
    require_same_grid(impl_->g, f.grid(), "convolve");
    Impl& im = *impl_;
    im.apply(f, im.khat, im.khat_im);
    ScalarField out(im.g);
    for (int j = 0; j < im.g.ny; ++j)
        for (int i = 0; i < im.g.nx; ++i) out(i, j) = im.real_buf[im.ridx(i, j)];
    return out;
}

VectorField ConvolutionPlan::grad_convolve(const ScalarField& f) const {
    require_same_grid(impl_->g, f.grid(), "grad_convolve");
    Impl& im = *impl_;
    if (!im.have_grad)
        throw ConfigError("grad_convolve: kernel is not differentiable");
    VectorField out(im.g);
    im.apply(f, im.kxhat_re, im.kxhat_im);
    for (int j = 0; j < im.g.ny; ++j)
        for (int i = 0; i <= im.g.nx; ++i) {
            if (im.g.periodic() && i == im.g.nx) continue;
            out.ux(i, j) = im.real_buf[im.ridx(i, j)];
        }
    im.apply(f, im.kyhat_re, im.kyhat_im);
    for (int j = 0; j <= im.g.ny; ++j)
        for (int i = 0; i < im.g.nx; ++i) {
            if (im.g.periodic() && j == im.g.ny) continue;
            out.uy(i, j) = im.real_buf[im.ridx(i, j)];
        }
    out.enforce_bc();
    return out;
}

double ConvolutionPlan::fourier_symbol(int kx, int ky) const {
    const Impl& im = *impl_;
    if (!im.g.periodic())
        throw ConfigError("fourier_symbol: defined for periodic mode only");
    // reduce to the stored r2c half-plane; the even real kernel makes the
    // transform real, and conjugate symmetry reflects both indices together
    kx = ((kx % im.g.nx) + im.g.nx) % im.g.nx;
    ky = ((ky % im.g.ny) + im.g.ny) % im.g.ny;
    if (kx > im.g.nx / 2) {
        kx = im.g.nx - kx;
        ky = (im.g.ny - ky) % im.g.ny;
    }
    const std::size_t idx = static_cast<std::size_t>(ky) * im.pcx + kx;
    return im.khat[idx] * im.g.cell_area();
}

}  // namespace nlchns
