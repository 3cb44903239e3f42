#include <cmath>
#include <iostream>
#include <string>

#include "common.hpp"
#include "nlchns/elliptic.hpp"
#include "nlchns/errors.hpp"
#include "nlchns/kernel.hpp"
#include "nlchns/ops.hpp"
#include "nlchns/rng.hpp"
#include "nlchns/snapshot.hpp"

namespace nlcli {

using namespace nlchns;

namespace {

double min_image(double o, double period) {
    return o - period * std::floor(o / period + 0.5);
}

/// Direct double-sum convolution, sampling the kernel exactly as the FFT
/// engine does (minimal image on the torus, zero padding in the box).
ScalarField conv_direct(const ConvolutionPlan& plan, const ScalarField& f) {
    const Grid& g = f.grid();
    const KernelSpec& ks = plan.spec();
    const double r0 = plan.rho0_eff();
    ScalarField out(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double s = 0.0;
            for (int n = 0; n < g.ny; ++n)
                for (int m = 0; m < g.nx; ++m) {
                    double ox = (i - m) * g.hx();
                    double oy = (j - n) * g.hy();
                    if (g.periodic()) {
                        ox = min_image(ox, g.lx);
                        oy = min_image(oy, g.ly);
                    }
                    s += ks.value(std::hypot(ox, oy), r0) * f(m, n);
                }
            out(i, j) = s * g.cell_area();
        }
    return out;
}

ScalarField random_scalar(const Grid& g, Rng& rng) {
    ScalarField f(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) f(i, j) = rng.normal();
    return f;
}

ScalarField random_mean_free(const Grid& g, Rng& rng) {
    ScalarField f = random_scalar(g, rng);
    const double m = mean(f);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) f(i, j) -= m;
    return f;
}

VectorField random_vector(const Grid& g, Rng& rng) {
    VectorField v(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) v.ux(i, j) = rng.normal();
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) v.uy(i, j) = rng.normal();
    v.enforce_bc();
    return v;
}

struct Suite {
    bool all_pass = true;
    int cases = 5;

    void report(const char* name, double dev, double tol) {
        const bool ok = dev <= tol;
        std::cout << name << ": max_dev=" << format_double(dev)
                  << " tol=" << format_double(tol)
                  << (ok ? " PASS" : " FAIL") << "\n";
        if (!ok) all_pass = false;
    }
};

}  // namespace

int cmd_opscheck(const OpscheckOptions& opt) {
    Suite suite;

    // Convolution engine vs direct double sum, both boundary modes.
    for (BoundaryMode bc : {BoundaryMode::Periodic, BoundaryMode::Box}) {
        const bool per = bc == BoundaryMode::Periodic;
        Grid g(12, 12, 1.0, 1.0, bc);
        KernelSpec ks;
        ks.family = KernelFamily::Gaussian;
        ks.eps = 0.1;
        ks.scale = per ? 4.3 : 17.0;  // keeps F'' + a coercive in either mode
        ConvolutionPlan plan(g, ks);
        Rng rng(per ? 101u : 102u);
        double dev = 0.0;
        for (int rep = 0; rep < suite.cases; ++rep) {
            ScalarField f = random_scalar(g, rng);
            if (opt.inject_fault && rep == 0) f(3, 4) += 1e-6;
            ScalarField engine = plan.convolve(f);
            if (opt.inject_fault && rep == 0) f(3, 4) -= 1e-6;
            ScalarField direct = conv_direct(plan, f);
            engine -= direct;
            dev = std::max(dev, max_abs(engine));
        }
        suite.report(per ? "convolution engine vs direct sum (periodic)"
                         : "convolution engine vs direct sum (box)",
                     dev, 1e-12);

        // Energy two-form identity:
        //   (1/4) sum_xy J(x-y) (phi_x - phi_y)^2 dA^2
        //     = (1/2) int a phi^2 - (1/2) <phi, J*phi>.
        double dev_e = 0.0;
        for (int rep = 0; rep < suite.cases; ++rep) {
            ScalarField phi = random_scalar(g, rng);
            const KernelSpec& spec = plan.spec();
            const double r0 = plan.rho0_eff();
            double pair_sum = 0.0;
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i)
                    for (int n = 0; n < g.ny; ++n)
                        for (int m = 0; m < g.nx; ++m) {
                            double ox = (i - m) * g.hx();
                            double oy = (j - n) * g.hy();
                            if (per) {
                                ox = min_image(ox, g.lx);
                                oy = min_image(oy, g.ly);
                            }
                            const double d = phi(i, j) - phi(m, n);
                            pair_sum += spec.value(std::hypot(ox, oy), r0) *
                                        d * d;
                        }
            pair_sum *= 0.25 * g.cell_area() * g.cell_area();
            double quad = 0.0;
            const ScalarField& af = plan.a_field();
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i)
                    quad += af(i, j) * phi(i, j) * phi(i, j);
            quad *= 0.5 * g.cell_area();
            quad -= 0.5 * dot(phi, plan.convolve(phi));
            dev_e = std::max(dev_e, std::abs(pair_sum - quad));
        }
        suite.report(per ? "energy two-form identity (periodic)"
                         : "energy two-form identity (box)",
                     dev_e, 1e-10);
    }

    // Mean-zero elliptic inverse: roundtrip and self-adjointness.
    {
        Grid g(12, 12, 1.0, 1.0, BoundaryMode::Box);
        SpectralPoisson poisson(g);
        Rng rng(103u);
        double dev_rt = 0.0, dev_sym = 0.0;
        for (int rep = 0; rep < suite.cases; ++rep) {
            ScalarField f = random_mean_free(g, rng);
            ScalarField g2 = random_mean_free(g, rng);
            ScalarField back = poisson.apply(poisson.inverse(f));
            back -= f;
            dev_rt = std::max(dev_rt, max_abs(back));
            dev_sym = std::max(dev_sym,
                               std::abs(dot(f, poisson.inverse(g2)) -
                                        dot(g2, poisson.inverse(f))));
        }
        suite.report("elliptic inverse roundtrip", dev_rt, 1e-10);
        suite.report("elliptic inverse self-adjointness", dev_sym, 1e-12);
    }

    // Gradient/divergence adjointness and trilinear antisymmetry.
    for (BoundaryMode bc : {BoundaryMode::Periodic, BoundaryMode::Box}) {
        const bool per = bc == BoundaryMode::Periodic;
        Grid g(12, 12, 1.0, 1.0, bc);
        Rng rng(per ? 104u : 105u);
        double dev_adj = 0.0, dev_tri = 0.0;
        for (int rep = 0; rep < suite.cases; ++rep) {
            ScalarField f = random_scalar(g, rng);
            VectorField v = random_vector(g, rng);
            dev_adj = std::max(dev_adj, std::abs(dot(gradient(f), v) +
                                                 dot(f, divergence(v))));
            VectorField u = random_vector(g, rng);
            VectorField w = random_vector(g, rng);
            dev_tri = std::max(dev_tri, std::abs(trilinear_b(u, v, w) +
                                                 trilinear_b(u, w, v)));
        }
        suite.report(per ? "gradient/divergence adjointness (periodic)"
                         : "gradient/divergence adjointness (box)",
                     dev_adj, 1e-12);
        suite.report(per ? "trilinear antisymmetry (periodic)"
                         : "trilinear antisymmetry (box)",
                     dev_tri, 1e-12);
    }

    std::cout << "opscheck: " << (suite.all_pass ? "PASS" : "FAIL") << "\n";
    return suite.all_pass ? 0 : 3;
}

}  // namespace nlcli
