#pragma once
/// @file diagnostics.hpp
/// @brief Trajectory instrumentation and the derived audits.
///
/// Everything here is a pure function of recorded states or of a
/// TrajectoryLog; nothing mutates a simulation.  The audits are the
/// executable counterparts of the solver's analytical guarantees:
///
///  * energy_identity_residual - the discrete defect of the energy balance
///    dE/dt + viscous dissipation + chemical dissipation = forcing work.
///    First-order in the step size for the splitting scheme; identically
///    zero on equilibria.
///  * dissipative_check - fits the absorbing envelope
///    E(t) <= E(0) exp(-k t) + floor + K and reports the fitted (k, K).
///  * contraction_metrics - the squared separations of two states in the
///    dual-norm metric (constant viscosity) and the L2 metric (variable
///    viscosity), the mean gap, and the growth-rate integrand used by the
///    continuous-dependence audit.
///  * holder_modulus - empirical space/time modulus-of-continuity exponents
///    from stored snapshots (diagnostic only).

#include <string>
#include <vector>

#include "nlchns/ops.hpp"
#include "nlchns/sim.hpp"

namespace nlchns {

// ---- trajectory records ------------------------------------------------------

struct TrajectorySample {
    double t = 0.0;
    EnergyBreakdown energy;
    double mass = 0.0;
    double max_phi = 0.0;
    NormSuite u_norms;
    NormSuite phi_norms;
    NormSuite grad_mu_norms;
    NormSuite grad_phi_norms;
};

/// Time-ordered sample series plus (optionally) stored phase snapshots.
class TrajectoryLog {
public:
    /// Appends a sample; times must be strictly increasing.
    void add(const TrajectorySample& s);
    /// Stores a phase snapshot; snapshot times must be strictly increasing.
    void add_snapshot(double t, const ScalarField& phi);

    const std::vector<TrajectorySample>& samples() const { return samples_; }
    const std::vector<double>& snapshot_times() const { return snap_t_; }
    const std::vector<ScalarField>& snapshots() const { return snaps_; }

    /// Time span covered by the samples (0 when fewer than two).
    double duration() const;

private:
    std::vector<TrajectorySample> samples_;
    std::vector<double> snap_t_;
    std::vector<ScalarField> snaps_;
};

/// Evaluates every per-sample functional of a state: energy breakdown,
/// mass, max|phi|, and the norm suites of u, phi and grad(mu).
TrajectorySample measure(const Simulator& sim, const SimState& s);

// ---- CSV surface -------------------------------------------------------------

inline constexpr const char* kCsvHeader =
    "t,E_total,E_kin,E_int,E_bulk,mass,maxphi,diss_visc,diss_chem,work,"
    "residual";

struct CsvRow {
    double t = 0.0;
    double e_total = 0.0;
    double e_kin = 0.0;
    double e_int = 0.0;
    double e_bulk = 0.0;
    double mass = 0.0;
    double maxphi = 0.0;
    double diss_visc = 0.0;
    double diss_chem = 0.0;
    double work = 0.0;
    double residual = 0.0;
};

/// Flattens a log into CSV rows.  The residual column carries the local
/// energy-balance defect of the interval starting at each row (trapezoidal
/// dissipation/work, forward energy difference); the last row gets 0.
std::vector<CsvRow> trajectory_rows(const TrajectoryLog& log);

/// Plain-text CSV with the exact header above and shortest round-trip
/// number formatting, so emitted files reproduce bit-identical doubles.
void write_csv(const std::string& path, const std::vector<CsvRow>& rows);

/// Strict reader for the writer's dialect.  Throws FormatError (with the
/// byte offset of the offending character) on any deviation, IoError if the
/// file cannot be read.
std::vector<CsvRow> read_csv(const std::string& path);

// ---- energy identity ---------------------------------------------------------

struct ResidualSeries {
    std::vector<double> r;  ///< one defect per sample interval
    double avg_abs = 0.0;   ///< time-averaged |r|
};

/// Discrete energy-balance defect
///   R_n = (E_{n+1}-E_n)/dt + avg(diss_visc) + avg(diss_chem) - avg(work)
/// over each interval of a uniformly sampled log (trapezoidal averages of
/// the rate terms).  Throws TrajectoryTooShort (<2 samples) or
/// NonuniformSampling (spacing varies beyond 1e-9 relative).
ResidualSeries energy_identity_residual(const TrajectoryLog& log);

// ---- dissipative envelope ----------------------------------------------------

struct DissipativeFit {
    double k_fit = 0.0;  ///< decay rate of the fitted envelope
    double K_fit = 0.0;  ///< plateau excess above the supplied floor
    bool ok = false;     ///< k_fit > 0 and K_fit finite
};

/// Fits E(t) <= E(0) exp(-k (t-t0)) + floor + K over all samples.
/// K is the smallest nonnegative plateau excess (measured over the final
/// fifth of the trajectory); k is the largest rate on a geometric grid for
/// which the envelope holds at every sample.  The floor is supplied by the
/// caller (bulk energy of the uniform mean state, plus any forcing
/// allowance).  Throws TrajectoryTooShort when the span is below 50.
DissipativeFit dissipative_check(const TrajectoryLog& log, double floor_level);

// ---- two-state separation ----------------------------------------------------

struct ContractionMetrics {
    double d_weak = 0.0;    ///< ||du||^2 + vdual_norm(dphi)^2
    double d_strong = 0.0;  ///< ||du||^2 + ||dphi||^2
    double mean_gap = 0.0;  ///< |mean(dphi)|
    double beta_integrand = 0.0;  ///< growth-rate integrand (unit constants)
};

/// Separation of two states on the simulator's grid.  d_weak measures the
/// phase gap in the dual norm of the mean-zero Poisson inverse (the metric
/// of the constant-viscosity uniqueness estimate), d_strong in plain L2
/// (variable-viscosity metric).  beta_integrand is
///   |grad J|_L1^4 (|phi_a|_L4^4 + |phi_b|_L4^4) + |grad u_b|^2
///   + (1 + |phi_a|_L4^2 + |u_b|_L4^4),
/// the computable part of the Gronwall rate with unit prefactors.
/// Throws GridMismatch when the states do not share the simulator's grid.
ContractionMetrics contraction_metrics(const SimState& a, const SimState& b,
                                       const Simulator& sim);

// ---- empirical modulus of continuity ------------------------------------------

struct HolderFit {
    double alpha_x = 0.0;  ///< spatial exponent (+inf for constant fields)
    double alpha_t = 0.0;  ///< temporal exponent (+inf for frozen fields)
};

/// Log-log fit of max|phi(x+r)-phi(x)| against axis-aligned offsets
/// r in {h, 2h, 4h, 8h} (averaged over snapshots), and of
/// max_x|phi(t+s)-phi(t)| against all stored snapshot separations s.
/// Constant (resp. time-independent) data yields the +inf sentinel.
/// Throws InsufficientSnapshots when fewer than three snapshots are stored.
HolderFit holder_modulus(const TrajectoryLog& log);

}  // namespace nlchns
