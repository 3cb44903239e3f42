#include "nlchns/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nlchns {

namespace {

/// ln(2), the endpoint value of the degenerate entropy with k1 = 1.
constexpr double ln2 = std::numbers::ln2;

[[noreturn]] void out_of_range(const char* where, double s) {
    throw PhaseOutOfRange(where, -1, -1, s);
}

double horner(const std::vector<double>& c, double s) {
    double v = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) v = v * s + c[k];
    return v;
}

double horner_d1(const std::vector<double>& c, double s) {
    double v = 0.0;
    for (std::size_t k = c.size(); k-- > 1;) v = v * s + k * c[k];
    return v;
}

double horner_d2(const std::vector<double>& c, double s) {
    double v = 0.0;
    for (std::size_t k = c.size(); k-- > 2;) v = v * s + k * (k - 1) * c[k];
    return v;
}

/// Singular convex part (theta/2)[(1+s)ln(1+s) + (1-s)ln(1-s)], valid |s|<=1
/// with the continuous limit at the endpoints.
double log_part(double theta, double s) {
    if (std::abs(s) > 1.0) out_of_range("potential value", s);
    const double up = (1.0 + s <= 0.0) ? 0.0 : (1.0 + s) * std::log1p(s);
    const double dn = (1.0 - s <= 0.0) ? 0.0 : (1.0 - s) * std::log1p(-s);
    return 0.5 * theta * (up + dn);
}

}  // namespace

// ---- PotentialSpec ----------------------------------------------------------

void PotentialSpec::validate() const {
    switch (kind) {
        case PotentialKind::DoubleWell:
            break;
        case PotentialKind::Polynomial: {
            if (coeffs.size() < 5)
                throw ConfigError("potential: polynomial degree must be >= 4");
            const std::size_t d = coeffs.size() - 1;
            if (d % 2 != 0)
                throw ConfigError("potential: polynomial degree must be even");
            if (!(coeffs.back() > 0.0))
                throw ConfigError(
                    "potential: polynomial leading coefficient must be positive");
            break;
        }
        case PotentialKind::Logarithmic:
        case PotentialKind::SplitSingular:
            if (!(theta > 0.0))
                throw ConfigError("potential: theta must be positive");
            if (!(theta_c > 0.0))
                throw ConfigError("potential: theta_c must be positive");
            break;
    }
}

double PotentialSpec::f(double s) const {
    switch (kind) {
        case PotentialKind::DoubleWell: {
            const double w = s * s - 1.0;
            return w * w;
        }
        case PotentialKind::Polynomial:
            return horner(coeffs, s);
        case PotentialKind::Logarithmic:
        case PotentialKind::SplitSingular:
            return log_part(theta, s) - 0.5 * theta_c * s * s;
    }
    return 0.0;
}

double PotentialSpec::df(double s) const {
    switch (kind) {
        case PotentialKind::DoubleWell:
            return 4.0 * s * (s * s - 1.0);
        case PotentialKind::Polynomial:
            return horner_d1(coeffs, s);
        case PotentialKind::Logarithmic:
        case PotentialKind::SplitSingular:
            if (std::abs(s) >= 1.0) out_of_range("potential slope", s);
            return theta * std::atanh(s) - theta_c * s;
    }
    return 0.0;
}

double PotentialSpec::d2f(double s) const {
    switch (kind) {
        case PotentialKind::DoubleWell:
            return 12.0 * s * s - 4.0;
        case PotentialKind::Polynomial:
            return horner_d2(coeffs, s);
        case PotentialKind::Logarithmic:
        case PotentialKind::SplitSingular:
            if (std::abs(s) >= 1.0) out_of_range("potential curvature", s);
            return theta / (1.0 - s * s) - theta_c;
    }
    return 0.0;
}

double PotentialSpec::f1(double s) const {
    return singular() ? log_part(theta, s) : f(s);
}

double PotentialSpec::df1(double s) const {
    if (!singular()) return df(s);
    if (std::abs(s) >= 1.0) out_of_range("potential slope", s);
    return theta * std::atanh(s);
}

double PotentialSpec::d2f1(double s) const {
    if (!singular()) return d2f(s);
    if (std::abs(s) >= 1.0) out_of_range("potential curvature", s);
    return theta / (1.0 - s * s);
}

double PotentialSpec::f2(double s) const {
    return singular() ? -0.5 * theta_c * s * s : 0.0;
}

double PotentialSpec::df2(double s) const {
    return singular() ? -theta_c * s : 0.0;
}

double PotentialSpec::d2f2(double) const {
    return singular() ? -theta_c : 0.0;
}

double PotentialSpec::d2f_lower_bound() const {
    switch (kind) {
        case PotentialKind::DoubleWell:
            return -4.0;
        case PotentialKind::Logarithmic:
        case PotentialKind::SplitSingular:
            // F'' = theta/(1-s^2) - theta_c >= theta - theta_c on (-1,1)
            return theta - theta_c;
        case PotentialKind::Polynomial: {
            // F'' is a polynomial with positive leading coefficient; its
            // minimum lies inside a Cauchy bound on the roots of F'''.
            std::vector<double> c2(coeffs.size() >= 2 ? coeffs.size() - 2 : 0);
            for (std::size_t k = 2; k < coeffs.size(); ++k)
                c2[k - 2] = k * (k - 1) * coeffs[k];
            double bound = 1.0;
            const double lead = std::abs(c2.back());
            for (std::size_t k = 0; k + 1 < c2.size(); ++k)
                bound = std::max(bound, 1.0 + std::abs(c2[k]) / lead);
            double lo = horner(c2, -bound);
            const int n = 4000;
            for (int i = 0; i <= n; ++i) {
                const double s = -bound + 2.0 * bound * i / n;
                lo = std::min(lo, horner(c2, s));
            }
            return lo;
        }
    }
    return 0.0;
}

// ---- MobilitySpec ------------------------------------------------------------

void MobilitySpec::validate() const {
    if (kind == MobilityKind::Constant && !(m0 > 0.0))
        throw ConfigError("mobility: m0 must be positive");
    if (kind == MobilityKind::Degenerate && !(k1 > 0.0))
        throw ConfigError("mobility: k1 must be positive");
}

double MobilitySpec::m(double s) const {
    if (kind == MobilityKind::Constant) return m0;
    if (std::abs(s) > 1.0) out_of_range("mobility", s);
    return k1 * (1.0 - s * s);
}

double MobilitySpec::dm(double s) const {
    if (kind == MobilityKind::Constant) return 0.0;
    if (std::abs(s) > 1.0) out_of_range("mobility slope", s);
    return -2.0 * k1 * s;
}

double MobilitySpec::entropy(double s) const {
    if (kind == MobilityKind::Constant) return 0.5 * s * s / m0;
    if (std::abs(s) > 1.0) out_of_range("mobility entropy", s);
    // the endpoint limit is finite even though both terms diverge; take it
    // explicitly rather than forming inf - inf
    if (std::abs(s) == 1.0) return ln2 / k1;
    return (s * std::atanh(s) + 0.5 * std::log1p(-s * s)) / k1;
}

double MobilitySpec::flux_primitive(double s) const {
    if (kind == MobilityKind::Constant) return m0 * s;
    return k1 * (s - s * s * s / 3.0);
}

// ---- ViscositySpec -----------------------------------------------------------

void ViscositySpec::validate() const {
    if (kind == ViscosityKind::Constant) {
        if (!(nu > 0.0)) throw ConfigError("viscosity: nu must be positive");
    } else {
        if (!(nu1 > 0.0) || !(nu2 > 0.0))
            throw ConfigError("viscosity: blend endpoints must be positive");
    }
}

double ViscositySpec::nu_of(double s) const {
    if (kind == ViscosityKind::Constant) return nu;
    return 0.5 * (nu1 + nu2) + 0.5 * (nu2 - nu1) * std::tanh(s);
}

double ViscositySpec::nu_min() const {
    return (kind == ViscosityKind::Constant) ? nu : std::min(nu1, nu2);
}

double ViscositySpec::nu_max() const {
    return (kind == ViscosityKind::Constant) ? nu : std::max(nu1, nu2);
}

double ViscositySpec::lipschitz_bound() const {
    return (kind == ViscosityKind::Constant) ? 0.0 : 0.5 * std::abs(nu2 - nu1);
}

}  // namespace nlchns
