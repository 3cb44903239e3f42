#pragma once
/// @file elliptic.hpp
/// @brief Constant-coefficient spectral solvers, the incompressible
/// projection, and the variable-viscosity stress operator with its
/// conjugate-gradient solvers.
///
/// The centerpiece is SpectralPoisson, an exact inverse of the 5-point
/// operator  Bn = -div grad  on cell centers with the domain's natural
/// boundary treatment (wrap on the torus, zero-flux wall faces in the box,
/// realized by a cosine transform).  "Exact" means inverse(apply(f)) returns
/// f minus its mean to roundoff, because the transform diagonalizes the very
/// stencil that ops.hpp assembles.
///
/// The viscous operator is defined variationally: viscous_force is the exact
/// negative adjoint of the strain pairing underlying viscous_dissipation, so
///   <viscous_force(u), u> = -viscous_dissipation(u)
/// holds to roundoff, which is what makes the discrete energy budget close.

#include <memory>

#include "nlchns/field.hpp"
#include "nlchns/potential.hpp"

namespace nlchns {

class SpectralPoisson {
public:
    explicit SpectralPoisson(const Grid& g);
    ~SpectralPoisson();
    SpectralPoisson(SpectralPoisson&&) noexcept;
    SpectralPoisson& operator=(SpectralPoisson&&) noexcept;
    SpectralPoisson(const SpectralPoisson&) = delete;
    SpectralPoisson& operator=(const SpectralPoisson&) = delete;

    const Grid& grid() const;

    /// Bn f = -div(grad f), assembled from the ops.hpp stencils.
    ScalarField apply(const ScalarField& f) const;

    /// The zero-mean solution of Bn u = f - mean(f).
    ScalarField inverse(const ScalarField& f) const;

    /// (I + kappa Bn)^{-1} f for kappa >= 0; used directly and as the
    /// preconditioner of the variable-coefficient solvers.
    ScalarField helmholtz_inverse(const ScalarField& f, double kappa) const;

    /// || grad Bn^{-1}(f - mean f) ||_{L2} + |mean f|: the negative-order
    /// norm in which phase-field perturbations contract.
    double vdual_norm(const ScalarField& f) const;

    /// Eigenvalue of Bn for mode (kx, ky): the wrap stencil uses
    /// (2/h^2)(1 - cos(2 pi k / n)) per axis, the wall stencil
    /// (2/h^2)(1 - cos(pi k / n)).
    double symbol(int kx, int ky) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Removes the discrete-gradient component of a face field, preserving wall
/// normals (which are zero for admissible fields) and leaving divergence-free
/// fields untouched to roundoff.
class LerayProjector {
public:
    explicit LerayProjector(const Grid& g);

    VectorField project(const VectorField& v) const;
    /// Same, also reporting the scalar potential that was removed
    /// (v = result + grad(pressure)).
    VectorField project(const VectorField& v, ScalarField& pressure) const;

private:
    SpectralPoisson poisson_;
};

/// 2 int nu |D(u)|^2 with D the symmetric gradient: normal strains live at
/// centers, the cross strain at corners (no-slip ghosts double the one-sided
/// wall derivative; corner quadrature weights are halved on walls).
double viscous_dissipation(const VectorField& u, const ScalarField& nu_center);

/// div(2 nu D(u)) as the exact negative adjoint of the strain pairing:
/// <viscous_force(u), w> = -(strain pairing of u and w) for all w that
/// respect the boundary constraints.
VectorField viscous_force(const VectorField& u, const ScalarField& nu_center);

/// Preconditioned CG for (I + dt Kvisc) u = rhs, Kvisc u = -viscous_force(u).
/// The operator is symmetric positive (semi-)definite on admissible fields.
class ViscousSolver {
public:
    explicit ViscousSolver(const Grid& g, double tol = 1e-12,
                           int max_iter = 2000);

    VectorField solve(const VectorField& rhs, const ScalarField& nu_center,
                      double dt) const;

    int last_iterations() const { return last_iterations_; }

private:
    Grid grid_;
    double tol_;
    int max_iter_;
    mutable int last_iterations_ = 0;
};

/// Solve (I + kappa Bn Mc) phi = rhs where Mc multiplies by the positive
/// center field c.  Internally symmetrized through z = c phi and solved by
/// preconditioned CG; kappa = dt * mobility.
ScalarField solve_helmholtz_center(const SpectralPoisson& poisson,
                                   const ScalarField& c, double kappa,
                                   const ScalarField& rhs, double tol = 1e-12,
                                   int max_iter = 4000,
                                   int* iterations = nullptr);

/// Solve (I - dt div(b grad)) w = rhs with positive face coefficients b
/// (stored in a VectorField: ux/uy hold the x-/y-face values).  SPD; CG with
/// a constant-coefficient spectral preconditioner.
ScalarField solve_helmholtz_face(const SpectralPoisson& poisson,
                                 const VectorField& bface, double dt,
                                 const ScalarField& rhs, double tol = 1e-12,
                                 int max_iter = 4000,
                                 int* iterations = nullptr);

}  // namespace nlchns
