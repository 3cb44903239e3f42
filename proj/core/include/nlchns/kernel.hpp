#pragma once
/// @file kernel.hpp
/// @brief Interaction kernels and the FFT convolution engine.
///
/// Periodic mode: circular convolution with the kernel sampled at
/// minimal-image offsets.  Box mode: linear convolution (zero extension
/// outside the domain) via zero-padded FFTs on a doubled grid.  Either way
/// the result is the midpoint-quadrature Riemann sum
///   (J*f)(x_k) = sum_m J(x_k - x_m) f(x_m) hx hy,
/// which tests verify against the O(N^4) direct sum.
///
/// The kernel mass field a(x) = (J*1)(x) is computed through the very same
/// transform path, so a equals the row sums of the discrete convolution
/// operator bit for bit.

#include <memory>

#include "nlchns/field.hpp"

namespace nlchns {

enum class KernelFamily { Gaussian, TopHat, Newtonian, Bessel };

struct KernelSpec {
    KernelFamily family = KernelFamily::Gaussian;
    double eps = 0.05;    ///< Gaussian width
    double delta = 0.05;  ///< TopHat radius
    double amp = 0.0;     ///< TopHat amplitude; 0 selects 1/(pi delta^2)
    double kappa = 1.0;   ///< Bessel decay rate
    double rho0 = 0.0;    ///< flat-core cap radius for singular kernels;
                          ///< 0 selects 2*max(hx,hy) when a plan is built
    double scale = 1.0;   ///< overall multiplier

    /// TopHat has a jump at its rim; gradient convolutions reject it.
    bool differentiable() const { return family != KernelFamily::TopHat; }

    /// J as a function of radius (rho0_eff already resolved).
    double value(double r, double rho0_eff) const;
    /// dJ/dr; zero inside the flat core.
    double dvalue(double r, double rho0_eff) const;

    void validate() const;
};

class ConvolutionPlan {
public:
    ConvolutionPlan(const Grid& g, const KernelSpec& spec);
    ~ConvolutionPlan();
    ConvolutionPlan(ConvolutionPlan&&) noexcept;
    ConvolutionPlan& operator=(ConvolutionPlan&&) noexcept;
    ConvolutionPlan(const ConvolutionPlan&) = delete;
    ConvolutionPlan& operator=(const ConvolutionPlan&) = delete;

    const Grid& grid() const;
    const KernelSpec& spec() const;
    double rho0_eff() const;

    /// J * f at cell centers.
    ScalarField convolve(const ScalarField& f) const;

    /// (grad J) * f at face positions (for drift fluxes).  Requires a
    /// differentiable kernel.
    VectorField grad_convolve(const ScalarField& f) const;

    /// a = J * 1 (identical code path as convolve).
    const ScalarField& a_field() const;

    /// (grad J) * 1; identically zero in periodic mode where a is constant.
    const VectorField& grad_a() const;

    double a_min() const;
    double a_max() const;
    /// sup_x int_Omega |J(x-y)| dy (sampled).
    double a_star() const;
    /// int |grad J| over the sampled offset stencil.
    double grad_l1() const;

    /// Discrete Fourier symbol of the convolution (periodic mode only):
    /// convolving cos(2 pi (kx x/lx + ky y/ly)) multiplies it by this value.
    double fourier_symbol(int kx, int ky) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace nlchns
