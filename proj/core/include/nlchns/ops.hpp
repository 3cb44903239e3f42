#pragma once
/// @file ops.hpp
/// @brief Second-order discrete calculus on the staggered grid.
///
/// Design contracts, all verified by tests:
///  * gradient and -divergence are exact adjoints of each other in the
///    discrete inner products (Box mode: for fields with zero wall-normal
///    components),
///  * trilinear_b(u,v,w) = -trilinear_b(u,w,v) holds identically (skew
///    pairing of the advection operator),
///  * the advection operator satisfies <advect_velocity(u,v), v> = 0 up to
///    roundoff whenever div u = 0 discretely,
///  * all norms carry the midpoint quadrature weight hx*hy so values are
///    grid-size independent.

#include "nlchns/field.hpp"
#include "nlchns/rng.hpp"

namespace nlchns {

struct NormSuite {
    double l2 = 0.0;
    double l4 = 0.0;
    double linf = 0.0;
    double h1_semi = 0.0;
};

// ---- means and inner products ----------------------------------------------

/// Integral mean (1/|Omega|) int f = plain average of cell values.
double mean(const ScalarField& f);

double max_abs(const ScalarField& f);

/// <f,g> = sum f g hx hy over cells.
double dot(const ScalarField& f, const ScalarField& g);

/// Face inner product; each physical face counted once (Box: wall faces
/// carry weight 1/2, the trapezoidal closure of the midpoint rule).
double dot(const VectorField& a, const VectorField& b);

NormSuite norms(const ScalarField& f);
NormSuite norms(const VectorField& v);

// ---- first-order operators ---------------------------------------------------

/// Cell field -> face field.  Periodic wrap or homogeneous Neumann walls
/// (wall-normal gradient faces are zero).
VectorField gradient(const ScalarField& f);

/// Face field -> cell field, the negative adjoint of gradient.
ScalarField divergence(const VectorField& v);

/// Linear interpolation of face samples to cell centers.
void to_centers(const VectorField& v, ScalarField& cx, ScalarField& cy);

// ---- advection ---------------------------------------------------------------

/// Skew-symmetric advection operator A(u)v on faces (average of divergence
/// and advective forms with matched 2-point interpolations).  Box mode uses
/// no-slip wall values for the tangential interpolants and pins wall-normal
/// result faces to zero.
VectorField advect_velocity(const VectorField& u, const VectorField& v);

/// Conservative scalar advection div(u phibar) with 2-point face averages.
/// Sums to zero over the domain (mass transport only).
ScalarField advect_scalar(const VectorField& u, const ScalarField& phi);

/// b(u,v,w) = ( <A(u)v, w> - <A(u)w, v> ) / 2.  Identically antisymmetric in
/// (v,w); coincides with <A(u)v, w> when div u = 0 discretely.
double trilinear_b(const VectorField& u, const VectorField& v, const VectorField& w);

// ---- deterministic random fields ---------------------------------------------

/// Mean-free band-limited noise, normalized to max|f| = amp.  Periodic mode
/// uses torus harmonics, Box mode Neumann-compatible cosine products.
ScalarField random_smooth(const Grid& g, Rng& rng, int kmax, double amp);

/// Exactly divergence-free random velocity: discrete curl of a corner stream
/// function (Box: stream vanishes on walls, so u.n = 0 exactly).
/// Normalized to max face speed = amp.
VectorField random_solenoidal(const Grid& g, Rng& rng, int kmax, double amp);

}  // namespace nlchns
