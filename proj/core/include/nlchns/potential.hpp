#pragma once
/// @file potential.hpp
/// @brief Bulk free-energy densities, mobility laws, and viscosity laws.
///
/// Singular potentials (Logarithmic, SplitSingular) are defined on the open
/// interval (-1, 1).  Their derivatives throw PhaseOutOfRange at or beyond
/// the endpoints; values themselves extend continuously to +-1 and are
/// evaluated there exactly.  Nothing is ever clamped: a phase value outside
/// the admissible range is a solver failure and must surface as one.

#include <vector>

#include "nlchns/errors.hpp"

namespace nlchns {

enum class PotentialKind { DoubleWell, Polynomial, Logarithmic, SplitSingular };

/// Bulk free energy density F(s).
///
///  - DoubleWell:      F(s) = (s^2 - 1)^2
///  - Polynomial:      F(s) = sum_k coeffs[k] s^k  (even degree >= 4,
///                     positive leading coefficient)
///  - Logarithmic:     F(s) = (theta/2)[(1+s)ln(1+s) + (1-s)ln(1-s)]
///                            - (theta_c/2) s^2,  on (-1, 1)
///  - SplitSingular:   same density as Logarithmic, but carrying the named
///                     convex/concave split F = F1 + F2 with
///                     F1 = (theta/2)[...] (singular, convex) and
///                     F2 = -(theta_c/2) s^2 (smooth, concave), which the
///                     implicit-explicit singular solver exploits.
struct PotentialSpec {
    PotentialKind kind = PotentialKind::DoubleWell;
    std::vector<double> coeffs;  ///< Polynomial coefficients, c0 first
    double theta = 0.8;          ///< singular-part temperature
    double theta_c = 1.6;        ///< quadratic-part temperature

    /// True for kinds defined only on (-1, 1).
    bool singular() const {
        return kind == PotentialKind::Logarithmic ||
               kind == PotentialKind::SplitSingular;
    }

    double f(double s) const;    ///< F(s); singular kinds allow |s| <= 1
    double df(double s) const;   ///< F'(s); singular kinds require |s| < 1
    double d2f(double s) const;  ///< F''(s); singular kinds require |s| < 1

    /// Convex part of the split (the full F for non-singular kinds).
    double f1(double s) const;
    double df1(double s) const;
    double d2f1(double s) const;
    /// Concave smooth remainder (zero for non-singular kinds).
    double f2(double s) const;
    double df2(double s) const;
    double d2f2(double s) const;

    /// A lower bound for F'' over the admissible range: exact for DoubleWell
    /// (-4) and the singular kinds (theta - theta_c), sampled inside a Cauchy
    /// root bound for Polynomial.
    double d2f_lower_bound() const;

    void validate() const;
};

enum class MobilityKind { Constant, Degenerate };

/// Mobility m(s) and its entropy function M(s) with M''(s) = 1/m(s),
/// M(0) = M'(0) = 0.
///
///  - Constant:    m = m0,               M(s) = s^2 / (2 m0)
///  - Degenerate:  m = k1 (1 - s^2),     M(s) = [s atanh(s)
///                                             + (1/2) ln(1 - s^2)] / k1,
///                 with the finite limit M(+-1) = ln(2)/k1 taken exactly.
struct MobilitySpec {
    MobilityKind kind = MobilityKind::Constant;
    double m0 = 1.0;  ///< constant mobility value
    double k1 = 1.0;  ///< degenerate mobility coefficient

    bool degenerate() const { return kind == MobilityKind::Degenerate; }

    double m(double s) const;        ///< mobility; degenerate requires |s| <= 1
    double dm(double s) const;       ///< dm/ds
    double entropy(double s) const;  ///< M(s); degenerate allows |s| <= 1

    /// Primitive G(s) = int_0^s m(t) dt (closed form for both kinds).
    double flux_primitive(double s) const;

    void validate() const;
};

enum class ViscosityKind { Constant, TanhBlend };

/// Kinematic viscosity as a function of phase.
///
///  - Constant:   nu(s) = nu
///  - TanhBlend:  nu(s) = (nu1 + nu2)/2 + (nu2 - nu1)/2 * tanh(s),
///                a globally Lipschitz law with range (min, max)(nu1, nu2).
struct ViscositySpec {
    ViscosityKind kind = ViscosityKind::Constant;
    double nu = 1.0;   ///< constant value
    double nu1 = 0.5;  ///< blend endpoint as s -> -inf
    double nu2 = 1.5;  ///< blend endpoint as s -> +inf

    bool variable() const { return kind == ViscosityKind::TanhBlend; }

    double nu_of(double s) const;
    double nu_min() const;  ///< infimum over all s
    double nu_max() const;  ///< supremum over all s
    double lipschitz_bound() const;

    void validate() const;
};

}  // namespace nlchns
