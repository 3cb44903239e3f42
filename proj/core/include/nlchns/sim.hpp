#pragma once
/// @file sim.hpp
/// @brief The coupled time stepper: phase transport first, then momentum,
/// composed as first-order operator splitting.
///
/// Step anatomy (time level n -> n+1, step size dt):
///   1. advective CFL check (dt (|u|x/hx + |u|y/hy) <= limit, or reject);
///   2. phase update, conservative form, by regime:
///        regular potential + constant mobility: linearly stabilized
///        implicit-explicit solve — (a + S) phi implicit, J*phi and
///        F'(phi) - S phi explicit, advection explicit;
///        singular and/or degenerate: implicit diffusion through the bounded
///        face coefficient m(phi)(F''(phi) + a) with frozen-coefficient
///        sweeps, explicit nonlocal drift and advection;
///      the divergence form makes the discrete mean exact, and it is
///      re-imposed to cancel solver-tolerance dust;
///   3. momentum update: explicit skew advection, capillary force and body
///      force, implicit viscous solve, incompressible projection.
/// Any CFLViolation / PhaseOutOfRange / NewtonDiverged / NoConvergence
/// inside an attempt rejects the step, halves dt, and retries; dt falling
/// below dt_min aborts by rethrowing the last failure.  A step never
/// mutates the state until it is accepted.

#include <cstdint>
#include <functional>
#include <string>

#include "nlchns/config.hpp"
#include "nlchns/elliptic.hpp"

namespace nlchns {

struct SimState {
    double t = 0.0;
    std::uint64_t step = 0;
    VectorField u;
    ScalarField phi;
    ScalarField pressure;  ///< last projection pressure (diagnostic only)
};

struct StepReport {
    double dt_used = 0.0;
    int retries = 0;           ///< dt halvings before acceptance
    int ch_iterations = 0;     ///< linear iterations in the phase solve
    int newton_iterations = 0; ///< frozen-coefficient sweeps (implicit path)
    int ns_iterations = 0;     ///< viscous solver iterations
    double max_phi = 0.0;
    double div_inf = 0.0;      ///< max |div u| after projection
    double mass = 0.0;         ///< mean(phi) after the step
};

/// All terms of the energy balance
///   d/dt [kinetic + interaction + bulk] = work_rate - diss_visc - diss_chem
/// evaluated as pure functionals of one state.
struct EnergyBreakdown {
    double kinetic = 0.0;      ///< (1/2) ||u||^2
    double interaction = 0.0;  ///< (1/4) iint J (phi(x)-phi(y))^2
    double bulk = 0.0;         ///< int F(phi)
    double total = 0.0;        ///< sum of the three
    double work_rate = 0.0;    ///< <h, u>
    double diss_visc = 0.0;    ///< 2 ||sqrt(nu) Du||^2
    double diss_chem = 0.0;    ///< int m(phi) |grad mu|^2 (flux-consistent
                               ///< quadratic form in the degenerate regime)
};

using StepHook = std::function<void(const SimState&, const StepReport&)>;

class Simulator {
public:
    /// Validates the config, builds the convolution plan and solvers, and
    /// runs the assumption audit; a failed audit throws ConfigError with the
    /// violated requirement in the message.
    explicit Simulator(const SimConfig& cfg);

    const SimConfig& config() const { return cfg_; }
    const ConvolutionPlan& plan() const { return plan_; }
    const SpectralPoisson& poisson() const { return poisson_; }
    const AssumptionReport& assumptions() const { return audit_; }
    const VectorField& forcing_field() const { return h_; }
    /// The explicit-split shift S actually in use (0 on the implicit path).
    double stabilization() const { return audit_.stabilization; }

    /// Deterministic initial data from the config's seed; velocity is
    /// projected divergence-free, the phase mean is imposed exactly, and
    /// singular regimes cap max|phi0| at init.phi_bound.
    SimState make_initial() const;

    /// One accepted step of nominal size scheme.dt (internally halved on
    /// rejection).  `cap` additionally bounds the attempted size.
    StepReport step(SimState& s);
    StepReport step(SimState& s, double cap);

    /// Step until s.t == t_target exactly (the last step is shortened to
    /// land on it).  The hook fires after every accepted step.
    void advance_to(SimState& s, double t_target, const StepHook& hook = {});

    EnergyBreakdown energy(const SimState& s) const;
    ScalarField mu_of(const ScalarField& phi) const;
    ScalarField nu_center(const ScalarField& phi) const;

private:
    ScalarField ch_regular(const SimState& s, double dt, StepReport& rep) const;
    ScalarField ch_implicit(const SimState& s, double dt, StepReport& rep) const;
    void attempt(SimState& s, double dt, StepReport& rep) const;

    SimConfig cfg_;
    ConvolutionPlan plan_;
    SpectralPoisson poisson_;
    LerayProjector leray_;
    ViscousSolver viscous_;
    AssumptionReport audit_;
    VectorField h_;
};

/// Checkpoint = {prefix}.u.snap + {prefix}.phi.snap + {prefix}.ckpt (a small
/// manifest carrying t, step, and the config hash).  Restarting from a
/// checkpoint reproduces the uninterrupted run bitwise in serial mode.
void write_checkpoint(const std::string& prefix, const SimState& s,
                      const std::string& config_hash);

/// Throws ConfigError if the stored hash differs from expect_hash (pass an
/// empty string to skip the check); FormatError/IoError on bad files.
SimState read_checkpoint(const std::string& prefix,
                         const std::string& expect_hash);

}  // namespace nlchns
