#include "nlchns/chem.hpp"

#include <cmath>

#include "nlchns/ops.hpp"

namespace nlchns {

namespace {

/// For singular potentials / degenerate mobilities, locate the first cell
/// outside the admissible range and report it.
void check_phase_range(const ScalarField& phi, bool open_interval,
                       const char* where) {
    const Grid& g = phi.grid();
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double s = phi(i, j);
            const bool bad =
                open_interval ? (std::abs(s) >= 1.0) : (std::abs(s) > 1.0);
            if (bad || !std::isfinite(s))
                throw PhaseOutOfRange(where, i, j, s);
        }
}

/// 2-point average of a center field onto faces.  Wall faces (box) take the
/// one-sided neighbor value; every consumer multiplies them by a factor that
/// vanishes there.
VectorField face_average(const ScalarField& f) {
    const Grid& g = f.grid();
    VectorField out(g);
    if (g.periodic()) {
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                out.ux(i, j) = 0.5 * (f(i, j) + f.wrap(i - 1, j));
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                out.uy(i, j) = 0.5 * (f(i, j) + f.wrap(i, j - 1));
        out.sync_periodic();
    } else {
        for (int j = 0; j < g.ny; ++j) {
            out.ux(0, j) = f(0, j);
            out.ux(g.nx, j) = f(g.nx - 1, j);
            for (int i = 1; i < g.nx; ++i)
                out.ux(i, j) = 0.5 * (f(i, j) + f(i - 1, j));
        }
        for (int i = 0; i < g.nx; ++i) {
            out.uy(i, 0) = f(i, 0);
            out.uy(i, g.ny) = f(i, g.ny - 1);
            for (int j = 1; j < g.ny; ++j)
                out.uy(i, j) = 0.5 * (f(i, j) + f(i, j - 1));
        }
    }
    return out;
}

/// out += c (elementwise on faces) coeff . field
void add_face_product(VectorField& out, const VectorField& a,
                      const VectorField& b, double c) {
    for (std::size_t k = 0; k < out.ux_size(); ++k)
        out.ux_data()[k] += c * a.ux_data()[k] * b.ux_data()[k];
    for (std::size_t k = 0; k < out.uy_size(); ++k)
        out.uy_data()[k] += c * a.uy_data()[k] * b.uy_data()[k];
}

}  // namespace

ScalarField chemical_potential(const ConvolutionPlan& plan,
                               const PotentialSpec& pot,
                               const ScalarField& phi) {
    require_same_grid(plan.grid(), phi.grid(), "chemical_potential");
    if (pot.singular()) check_phase_range(phi, true, "chemical_potential");
    const Grid& g = phi.grid();
    ScalarField mu = plan.convolve(phi);
    const ScalarField& a = plan.a_field();
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double s = phi(i, j);
            mu(i, j) = a(i, j) * s - mu(i, j) + pot.df(s);
        }
    return mu;
}

VectorField korteweg_force(const ConvolutionPlan& plan, const PotentialSpec& pot,
                           const ScalarField& phi, KortewegForm form) {
    require_same_grid(plan.grid(), phi.grid(), "korteweg_force");
    const Grid& g = phi.grid();
    VectorField out(g);
    if (form == KortewegForm::MuGradPhi) {
        const ScalarField mu = chemical_potential(plan, pot, phi);
        add_face_product(out, face_average(mu), gradient(phi), 1.0);
    } else {
        if (pot.singular()) check_phase_range(phi, true, "korteweg_force");
        ScalarField half_sq(g);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                half_sq(i, j) = 0.5 * phi(i, j) * phi(i, j);
        add_face_product(out, face_average(half_sq), plan.grad_a(), -1.0);
        add_face_product(out, face_average(plan.convolve(phi)), gradient(phi),
                         -1.0);
    }
    out.enforce_bc();
    return out;
}

FluxParts flux_parts(const ConvolutionPlan& plan, const PotentialSpec& pot,
                     const MobilitySpec& mob, const ScalarField& phi) {
    require_same_grid(plan.grid(), phi.grid(), "flux_parts");
    if (pot.singular() || mob.degenerate())
        check_phase_range(phi, pot.singular(), "flux_parts");
    const Grid& g = phi.grid();

    // center fields: mobility and the bounded diffusion coefficient
    // m (F'' + a); for the degenerate/singular pair the product
    // m(s) F''(s) = k1 theta - k1 theta_c (1 - s^2) is evaluated in its
    // cancelled form so nothing blows up as s -> +-1
    ScalarField mids(g), coeff_c(g);
    const ScalarField& a = plan.a_field();
    const bool cancelled = mob.degenerate() && pot.singular();
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double s = phi(i, j);
            const double ms = mob.m(s);
            mids(i, j) = ms;
            const double mf2 = cancelled ? mob.k1 * (pot.theta -
                                                     pot.theta_c * (1.0 - s * s))
                                         : ms * pot.d2f(s);
            coeff_c(i, j) = mf2 + ms * a(i, j);
        }

    FluxParts parts{VectorField(g), VectorField(g)};
    parts.coeff = face_average(coeff_c);

    // drift = m_face (phi_face grad a - (grad J)*phi); both gradient factors
    // vanish on wall faces, so the drift does too
    const VectorField m_face = face_average(mids);
    const VectorField phi_face = face_average(phi);
    const VectorField gjphi = plan.grad_convolve(phi);
    const VectorField& ga = plan.grad_a();
    for (std::size_t k = 0; k < parts.drift.ux_size(); ++k)
        parts.drift.ux_data()[k] =
            m_face.ux_data()[k] * (phi_face.ux_data()[k] * ga.ux_data()[k] -
                                   gjphi.ux_data()[k]);
    for (std::size_t k = 0; k < parts.drift.uy_size(); ++k)
        parts.drift.uy_data()[k] =
            m_face.uy_data()[k] * (phi_face.uy_data()[k] * ga.uy_data()[k] -
                                   gjphi.uy_data()[k]);
    parts.drift.enforce_bc();
    return parts;
}

VectorField phase_flux(const FluxParts& parts, const ScalarField& phi) {
    VectorField q = parts.drift;
    add_face_product(q, parts.coeff, gradient(phi), 1.0);
    q.enforce_bc();
    return q;
}

double bulk_energy(const PotentialSpec& pot, const ScalarField& phi) {
    const Grid& g = phi.grid();
    double s = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) s += pot.f(phi(i, j));
    return s * g.cell_area();
}

double interaction_energy(const ConvolutionPlan& plan, const ScalarField& phi) {
    require_same_grid(plan.grid(), phi.grid(), "interaction_energy");
    const Grid& g = phi.grid();
    const ScalarField jphi = plan.convolve(phi);
    const ScalarField& a = plan.a_field();
    double s = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double p = phi(i, j);
            s += a(i, j) * p * p - p * jphi(i, j);
        }
    return 0.5 * s * g.cell_area();
}

double entropy_integral(const MobilitySpec& mob, const ScalarField& phi) {
    const Grid& g = phi.grid();
    double s = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) s += mob.entropy(phi(i, j));
    return s * g.cell_area();
}

double lambda_slope(const PotentialSpec& pot, const MobilitySpec& mob, double s,
                    double a) {
    if (mob.degenerate() && pot.singular())
        return mob.k1 * (pot.theta - pot.theta_c * (1.0 - s * s)) +
               mob.m(s) * a;
    return mob.m(s) * (pot.d2f(s) + a);
}

double lambda_primitive(const PotentialSpec& pot, const MobilitySpec& mob,
                        double s) {
    if (!mob.degenerate()) return mob.m0 * (pot.df(s) - pot.df(0.0));
    if (pot.singular())
        return mob.k1 *
               (pot.theta * s - pot.theta_c * (s - s * s * s / 3.0));
    throw ConfigError(
        "lambda_primitive: no closed form for this mobility/potential pair");
}

double alpha0(const PotentialSpec& pot, const MobilitySpec& mob) {
    if (!(mob.degenerate() && pot.singular()))
        throw ConfigError(
            "alpha0: defined for the degenerate/singular pair only");
    return mob.k1 * pot.theta;
}

double lambda_slope_lower_bound(const PotentialSpec& pot,
                                const MobilitySpec& mob, double a_min) {
    if (!mob.degenerate())
        return mob.m0 * (pot.d2f_lower_bound() + a_min);
    if (pot.singular()) {
        // k1 theta + k1 (1-s^2)(a - theta_c): linear in (1-s^2) in [0,1]
        return mob.k1 * (pot.theta + std::min(0.0, a_min - pot.theta_c));
    }
    double lo = lambda_slope(pot, mob, -1.0, a_min);
    const int n = 4000;
    for (int i = 0; i <= n; ++i) {
        const double s = -1.0 + 2.0 * i / n;
        lo = std::min(lo, lambda_slope(pot, mob, s, a_min));
    }
    return lo;
}

}  // namespace nlchns
