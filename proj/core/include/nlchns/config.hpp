#pragma once
/// @file config.hpp
/// @brief Flat key=value run configuration, canonical serialization, and the
/// startup audit of the structural assumptions the solver relies on.
///
/// The config format is intentionally primitive: one `section.key=value` per
/// line, `#` comments, no nesting.  Canonical serialization emits every key
/// in a fixed order with shortest-round-trip number formatting, so the hash
/// of a config is stable across platforms and across load/save cycles.

#include <cstdint>
#include <string>

#include "nlchns/chem.hpp"
#include "nlchns/field.hpp"
#include "nlchns/kernel.hpp"
#include "nlchns/potential.hpp"

namespace nlchns {

// ---- forcing ------------------------------------------------------------------

enum class ForcingKind { Zero, ConstantVector, FourierBody };

/// Time-independent body force h(x) for the momentum equation.
struct ForcingSpec {
    ForcingKind kind = ForcingKind::Zero;
    double fx = 0.0, fy = 0.0;  ///< ConstantVector components
    int kx = 1, ky = 0;         ///< FourierBody wavenumbers
    double amp = 0.0;           ///< FourierBody amplitude

    bool zero() const { return kind == ForcingKind::Zero; }
    void validate() const;
};

/// Sample the force onto faces (wall-normal components zeroed in box mode).
VectorField body_force(const Grid& g, const ForcingSpec& f);

// ---- initial data -------------------------------------------------------------

enum class VelocityInit { Zero, TaylorGreen, RandomSolenoidal };
enum class PhaseInit { Constant, CosineMix, RandomSmooth };

struct InitSpec {
    VelocityInit u_kind = VelocityInit::Zero;
    double u_amp = 1.0;
    int u_kmax = 3;

    PhaseInit phi_kind = PhaseInit::Constant;
    double phi_mean = 0.0;   ///< target mean (the Constant value)
    double phi_amp = 0.1;    ///< fluctuation amplitude around the mean
    double phi_bound = 0.95; ///< hard cap on max|phi0| (singular regimes)
    int phi_kmax = 3;

    void validate() const;
};

// ---- scheme / solver / output knobs ---------------------------------------------

struct SchemeSpec {
    double dt = 1e-3;
    double t_end = 1.0;
    double dt_min = 1e-9;          ///< abort threshold for step halving
    double cfl = 0.5;              ///< advective CFL limit
    double stabilization = -1.0;   ///< explicit-split shift S; <0 = automatic
    int max_retries = 12;          ///< dt halvings per step before aborting

    double tol = 1e-11;            ///< linear solver relative tolerance
    int max_iter = 4000;           ///< linear solver iteration cap
    double newton_tol = 1e-12;     ///< nonlinear (frozen-coefficient) tol
    int newton_max_iter = 50;

    /// Capillary force assembly.  MuGradPhi pairs exactly with the
    /// conservative phase advection (clean discrete energy budget);
    /// BoundedCoefficients is the gauge-equivalent bounded form.
    KortewegForm korteweg = KortewegForm::MuGradPhi;

    void validate() const;
};

struct OutputSpec {
    double sample_dt = 0.0;  ///< diagnostics sampling stride; 0 = every step
    int snapshot_count = 0;  ///< evenly spaced field snapshots (0 = none)

    void validate() const;
};

// ---- the assembled configuration ------------------------------------------------

struct SimConfig {
    Grid grid{64, 64, 1.0, 1.0, BoundaryMode::Periodic};
    KernelSpec kernel;
    PotentialSpec potential;
    MobilitySpec mobility;
    ViscositySpec viscosity;
    ForcingSpec forcing;
    InitSpec init;
    SchemeSpec scheme;
    OutputSpec output;
    std::uint64_t seed = 42;
    double c0 = 0.05;  ///< required coercivity margin min(F'' + a) >= c0

    /// Structural validation: every sub-spec plus the regime compatibility
    /// rules (degenerate mobility requires the split singular potential;
    /// singular potentials require |mean phi0| < 1 and phi_bound < 1).
    /// Throws ConfigError.
    void validate() const;

    bool singular() const { return potential.singular(); }
    bool degenerate() const { return mobility.degenerate(); }
    bool variable_viscosity() const { return viscosity.variable(); }
};

/// Parse the key=value text.  Unknown keys, malformed numbers, and bad enum
/// strings throw ConfigError naming the offending key.  Parsed configs are
/// validated before being returned.
SimConfig parse_config(const std::string& text);
SimConfig load_config(const std::string& path);  ///< IoError on read failure

/// Canonical text form: every key, fixed order, shortest round-trip floats.
/// parse_config(serialize_config(c)) reproduces c exactly.
std::string serialize_config(const SimConfig& c);

/// FNV-1a hash of the canonical serialization, as 16 lowercase hex digits.
std::string config_hash(const SimConfig& c);

// ---- startup assumption audit ---------------------------------------------------

/// Derived constants checked before a run starts.  Hard requirements:
///  - kernel positivity a >= 0 (enforced when the plan is built),
///  - coercivity min_s F''(s) + min_x a(x) >= c0 > 0,
///  - viscosity bounds 0 < nu_min <= nu_max;
/// and additionally for degenerate mobility (paired with the split
/// potential):
///  - convexity interpolation: the smallest rho with
///    rho F1'' + F2'' + a >= 0 everywhere satisfies rho < 1,
///  - product lower bound alpha0 = min m(s) F1''(s) > 0,
///  - stability margin: F1'' exceeds kappa_required = 4 (a* - a_min - b_star)
///    within a nonempty endpoint band of width eps0.
struct AssumptionReport {
    double a_min = 0.0, a_max = 0.0, a_star = 0.0;
    double grad_j_l1 = 0.0;     ///< sampled |grad J| mass
    double d2f_min = 0.0;       ///< inf F'' over the admissible range
    double coercivity = 0.0;    ///< d2f_min + a_min
    double c0 = 0.0;            ///< required margin
    double b_star = 0.0;        ///< min F2'' (degenerate pairs; else 0)
    double kappa_required = 0.0;
    double eps0 = 0.0;          ///< endpoint band where F1'' >= kappa_required
    double rho = 0.0;           ///< convexity interpolation constant
    double alpha0 = 0.0;        ///< min m F1''
    double nu_min = 0.0, nu_max = 0.0;
    double stabilization = 0.0; ///< the S actually used by the scheme
    bool ok = false;
    std::string failure;        ///< first violated requirement, empty if ok
};

/// Compute the report.  Never throws for a violated assumption (the caller
/// decides); throws only for structural errors.
AssumptionReport audit_assumptions(const SimConfig& cfg,
                                   const ConvolutionPlan& plan);

}  // namespace nlchns
