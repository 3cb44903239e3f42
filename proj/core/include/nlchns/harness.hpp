#pragma once
/// @file harness.hpp
/// @brief Orchestrated experiments over the simulator.
///
/// Three experiment families turn the solver's qualitative guarantees into
/// measured, falsifiable numbers:
///
///  * run_twin - integrates a base trajectory and a perturbed sibling with
///    identical solver settings and records their separation in the metric
///    matched to the viscosity model (dual-norm metric for constant
///    viscosity, L2 metric for variable viscosity).  Zero perturbation must
///    reproduce the base bitwise; small perturbations must stay inside a
///    fitted exponential envelope.
///  * run_refinement - spatial or temporal self-convergence ladders against
///    a finer reference level, sharing initial data across levels.
///  * run_longtime - a single autonomous run long enough to fit the
///    dissipative envelope E(t) <= E(0) exp(-kt) + floor + K and locate the
///    time after which the gradient norms settle under fixed plateaus.
///
/// Everything is deterministic: child seeds derive from the config seed by
/// fixed indices (velocity init 0, phase init 1, perturbation noise 2,
/// batch member k uses root seed + k), and batch results are ordered by
/// construction, not completion.

#include <cstdint>
#include <string>
#include <vector>

#include "nlchns/diagnostics.hpp"

namespace nlchns {

// ---- twin experiments ----------------------------------------------------------

enum class PerturbationKind {
    VelocityNoise,  ///< solenoidal velocity noise of amplitude eps
    PhaseNoise,     ///< band-limited phase noise of amplitude eps
    MeanShift,      ///< constant phase offset eps
    ForcingGap,     ///< body-force amplitude offset eps, identical states
};

struct Perturbation {
    PerturbationKind kind = PerturbationKind::PhaseNoise;
    double eps = 1e-6;
    /// PhaseNoise only: keep the twin's phase mean identical (the noise
    /// field is mean-free); when false, half the amplitude goes into a
    /// mean offset.
    bool mean_preserving = true;
};

struct TwinExperiment {
    SimConfig base;
    Perturbation perturbation;
    double horizon = 1.0;  ///< compared time span
    int stride = 10;       ///< steps between separation samples
};

struct TwinSample {
    double t = 0.0;
    ContractionMetrics metrics;
};

struct TwinReport {
    std::vector<TwinSample> series;
    bool weak_metric = true;   ///< which d_* the scalars below refer to
    double d0 = 0.0;           ///< initial separation
    double kappa_fit = 0.0;    ///< max_t log(d(t)/d0)/t  (0 when d0 = 0)
    bool envelope_pass = false;  ///< d(t) <= d0 exp(kappa_fit t) everywhere
    double forcing_envelope = 0.0;  ///< ForcingGap: max d(t)/(t |dh|^2)
    double gap_integral = 0.0;   ///< int (|dphi|^2 + |grad du|^2) dt
    double beta_integral = 0.0;  ///< int beta dt (trapezoid)
    std::uint64_t seed = 0;      ///< config seed the pair used
};

/// Integrates the twin pair and audits the separation.  The twins must
/// accept every step at the nominal size; if their retry ladders diverge
/// the experiment aborts (NoConvergence) rather than compare misaligned
/// times.  Perturbation noise uses the dedicated child seed, so a report
/// is a pure function of (config, perturbation).
TwinReport run_twin(const TwinExperiment& exp);

/// run_twin across perturbation magnitudes.  For quadratic metrics the
/// rescaled separations d(t)/eps^2 must collapse onto one curve; the report
/// records the worst pairwise deviation from collapse over the horizon.
struct CollapseReport {
    std::vector<double> eps;
    std::vector<TwinReport> runs;
    double max_collapse_dev = 0.0;  ///< max |d_i(t) eps_j^2 / (d_j(t) eps_i^2) - 1|
};
CollapseReport run_collapse(const TwinExperiment& exp,
                            const std::vector<double>& eps_list);

/// Batch of twin experiments with member k reseeded to seed+k; reports are
/// returned in member order.
std::vector<TwinReport> run_twin_batch(const TwinExperiment& exp, int count);

// ---- refinement ladders ---------------------------------------------------------

enum class RefinementAxis { Spatial, Temporal };

struct RefinementStudy {
    SimConfig base;  ///< coarsest level (its grid / dt anchor the ladder)
    RefinementAxis axis = RefinementAxis::Spatial;
    int levels = 3;           ///< ladder size, halving h or dt per level
    int reference_extra = 1;  ///< extra halvings for the reference run
    double t_end = 0.1;       ///< comparison time
};

struct RefinementRow {
    double param = 0.0;  ///< grid spacing h or step size dt
    double err_phi = 0.0;
    double err_u = 0.0;
};

struct RefinementTable {
    RefinementAxis axis = RefinementAxis::Spatial;
    std::vector<RefinementRow> rows;      ///< coarse to fine
    std::vector<double> orders_phi;       ///< per-rung observed order
    bool monotone = false;                ///< errors strictly decreasing
};

/// Runs the ladder plus its reference level and compares terminal states.
/// Spatial ladders restrict the reference by conservative block averaging
/// onto each level's grid and therefore require analytic (grid-independent)
/// initial data; random initial fields are rejected as ConfigError.
RefinementTable run_refinement(const RefinementStudy& study);

// ---- long-horizon dissipation ----------------------------------------------------

struct LongtimeReport {
    TrajectoryLog log;
    double floor_level = 0.0;  ///< bulk energy of the uniform mean state
    DissipativeFit fit;
    double t_star = 0.0;          ///< first time the gradients stay under plateau
    double plateau_grad_u = 0.0;  ///< fitted plateau for |grad u|
    double plateau_grad_phi = 0.0;  ///< fitted plateau for |grad phi|_L4
};

/// Autonomous run to cfg.scheme.t_end (>= 100, else TrajectoryTooShort),
/// sampled every sample_dt, followed by the dissipative-envelope fit and
/// the gradient-plateau scan.
LongtimeReport run_longtime(const SimConfig& cfg, double sample_dt);

// ---- report serialization ---------------------------------------------------------

/// JSON documents with a stable field schema (documented in the respective
/// report structs); all numbers round-trip exactly.
std::string to_json(const TwinReport& r);
std::string to_json(const CollapseReport& r);
std::string to_json(const RefinementTable& t);
std::string to_json(const LongtimeReport& r);

/// Spearman rank correlation with average ranks on ties; used to relate
/// fitted separation rates to the growth-rate integrand across a batch.
double spearman_rho(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace nlchns
