#pragma once
/// @file chem.hpp
/// @brief Field-level constitutive assembly: chemical potential, capillary
/// forcing, and the coefficient/drift form of the phase flux.
///
/// All face quantities follow the staggered convention of ops.hpp: the
/// x-face (i, j) sits between centers (i-1, j) and (i, j).  In box mode every
/// assembled face quantity vanishes on wall faces, matching the no-flux /
/// no-slip constraint structure, so conservative divergences of these fields
/// conserve mass exactly.

#include "nlchns/kernel.hpp"
#include "nlchns/potential.hpp"

namespace nlchns {

/// mu = a.phi - J*phi + F'(phi) at cell centers.  For singular potentials
/// every cell is range-checked first; violations throw PhaseOutOfRange with
/// the offending cell attached.
ScalarField chemical_potential(const ConvolutionPlan& plan,
                               const PotentialSpec& pot,
                               const ScalarField& phi);

/// Two algebraically equivalent (up to a discrete gradient) assemblies of
/// the capillary force density.  Their difference is annihilated by the
/// incompressible projection as the mesh refines.
enum class KortewegForm {
    /// face-average(mu) * grad(phi): the form whose pairing with the
    /// conservative phase advection telescopes exactly (discrete energy
    /// identity).
    MuGradPhi,
    /// -face-average(phi^2/2) * grad(a) - face-average(J*phi) * grad(phi):
    /// avoids differencing mu; all coefficients stay bounded for singular
    /// potentials.
    BoundedCoefficients,
};

VectorField korteweg_force(const ConvolutionPlan& plan, const PotentialSpec& pot,
                           const ScalarField& phi, KortewegForm form);

/// The phase flux q = m(phi) grad(mu) in coefficient/drift form,
///   q = coeff . grad(phi) + drift,
///   coeff = m(phi) (F''(phi) + a)      (2-point face average; stays bounded
///                                       as the mobility degenerates),
///   drift = m(phi) (phi grad a - (grad J)*phi),
/// which never differences F'(phi) and so survives phi -> +-1.
struct FluxParts {
    VectorField coeff;  ///< face diffusion coefficient (not a vector field
                        ///< per se; ux/uy hold the x-/y-face coefficients)
    VectorField drift;  ///< mobility-weighted nonlocal drift at faces
};

FluxParts flux_parts(const ConvolutionPlan& plan, const PotentialSpec& pot,
                     const MobilitySpec& mob, const ScalarField& phi);

/// Assemble q = coeff . grad(phi) + drift.
VectorField phase_flux(const FluxParts& parts, const ScalarField& phi);

/// int F(phi) dx.
double bulk_energy(const PotentialSpec& pot, const ScalarField& phi);

/// (1/2) [ <a phi, phi> - <phi, J*phi> ], the expanded interaction energy;
/// agrees with (1/4) iint J (phi(x)-phi(y))^2 identically on the discrete
/// stencil.
double interaction_energy(const ConvolutionPlan& plan, const ScalarField& phi);

/// int M(phi) dx for the mobility's entropy function.
double entropy_integral(const MobilitySpec& mob, const ScalarField& phi);

/// Pointwise slope of the flux potential: m(s) (F''(s) + a).
double lambda_slope(const PotentialSpec& pot, const MobilitySpec& mob, double s,
                    double a);

/// int_0^s m(t) F''(t) dt in closed form.  Available for constant mobility
/// (any potential) and for the degenerate/singular pair, where it equals
///   k1 [ theta s - theta_c (s - s^3/3) ].
double lambda_primitive(const PotentialSpec& pot, const MobilitySpec& mob,
                        double s);

/// The structural ellipticity constant of the degenerate/singular pair:
/// m(s) (F''(s) + a) >= k1 theta whenever a >= theta_c.
double alpha0(const PotentialSpec& pot, const MobilitySpec& mob);

/// A lower bound for lambda_slope over the admissible phase range given
/// min_x a(x): exact for constant mobility and the degenerate/singular pair,
/// sampled otherwise.
double lambda_slope_lower_bound(const PotentialSpec& pot,
                                const MobilitySpec& mob, double a_min);

}  // namespace nlchns
