#include "nlchns/sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "nlchns/ops.hpp"
#include "nlchns/rng.hpp"
#include "nlchns/snapshot.hpp"

namespace nlchns {

namespace {

constexpr double pi = std::numbers::pi;

/// Locate the worst cell for the PhaseOutOfRange payload.
[[noreturn]] void throw_phase_violation(const ScalarField& phi,
                                        const char* where) {
    const Grid& g = phi.grid();
    int wi = 0, wj = 0;
    double worst = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (std::abs(phi(i, j)) > worst) {
                worst = std::abs(phi(i, j));
                wi = i;
                wj = j;
            }
    throw PhaseOutOfRange(where, wi, wj, phi(wi, wj));
}

}  // namespace

Simulator::Simulator(const SimConfig& cfg)
    : cfg_((cfg.validate(), cfg)),
      plan_(cfg.grid, cfg.kernel),
      poisson_(cfg.grid),
      leray_(cfg.grid),
      viscous_(cfg.grid, cfg.scheme.tol, cfg.scheme.max_iter),
      audit_(audit_assumptions(cfg, plan_)),
      h_(body_force(cfg.grid, cfg.forcing)) {
    if (!audit_.ok) throw ConfigError("assumption audit failed: " + audit_.failure);
}

// ---- initial data -----------------------------------------------------------------

SimState Simulator::make_initial() const {
    const Grid& g = cfg_.grid;
    const InitSpec& init = cfg_.init;
    SimState s;
    s.u = VectorField(g);
    s.phi = ScalarField(g);
    s.pressure = ScalarField(g);

    Rng urng(child_seed(cfg_.seed, 0));
    Rng prng(child_seed(cfg_.seed, 1));

    switch (init.u_kind) {
        case VelocityInit::Zero:
            break;
        case VelocityInit::TaylorGreen: {
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i <= g.nx; ++i)
                    s.u.ux(i, j) = init.u_amp * std::sin(2.0 * pi * g.xf(i) / g.lx) *
                                   std::cos(2.0 * pi * g.yc(j) / g.ly);
            const double b = init.u_amp * g.ly / g.lx;
            for (int j = 0; j <= g.ny; ++j)
                for (int i = 0; i < g.nx; ++i)
                    s.u.uy(i, j) = -b * std::cos(2.0 * pi * g.xc(i) / g.lx) *
                                   std::sin(2.0 * pi * g.yf(j) / g.ly);
            break;
        }
        case VelocityInit::RandomSolenoidal:
            s.u = random_solenoidal(g, urng, init.u_kmax, init.u_amp);
            break;
    }
    s.u.enforce_bc();
    s.u = leray_.project(s.u);

    ScalarField noise(g);  // normalized to max |noise| = 1 when present
    switch (init.phi_kind) {
        case PhaseInit::Constant:
            break;
        case PhaseInit::CosineMix: {
            // three band-limited harmonics with seeded wavenumbers/phases
            for (int m = 0; m < 3; ++m) {
                const int kx = 1 + static_cast<int>(prng.next_u64() %
                                                    static_cast<unsigned>(init.phi_kmax));
                const int ky = 1 + static_cast<int>(prng.next_u64() %
                                                    static_cast<unsigned>(init.phi_kmax));
                const double w = prng.uniform(0.5, 1.0);
                if (g.periodic()) {
                    const double ph = prng.uniform(0.0, 2.0 * pi);
                    for (int j = 0; j < g.ny; ++j)
                        for (int i = 0; i < g.nx; ++i)
                            noise(i, j) += w * std::cos(2.0 * pi *
                                                            (kx * g.xc(i) / g.lx +
                                                             ky * g.yc(j) / g.ly) +
                                                        ph);
                } else {
                    for (int j = 0; j < g.ny; ++j)
                        for (int i = 0; i < g.nx; ++i)
                            noise(i, j) += w * std::cos(pi * kx * g.xc(i) / g.lx) *
                                           std::cos(pi * ky * g.yc(j) / g.ly);
                }
            }
            const double m = max_abs(noise);
            if (m > 0.0) noise *= 1.0 / m;
            break;
        }
        case PhaseInit::RandomSmooth:
            noise = random_smooth(g, prng, init.phi_kmax, 1.0);
            break;
    }

    double amp = init.phi_amp;
    if (cfg_.singular())
        amp = std::min(amp, (init.phi_bound - std::abs(init.phi_mean)) *
                                (1.0 - 1e-12));
    noise *= amp;
    noise += init.phi_mean;
    s.phi = std::move(noise);
    s.phi += init.phi_mean - mean(s.phi);  // exact mean
    if (cfg_.singular() && max_abs(s.phi) >= 1.0)
        throw_phase_violation(s.phi, "initial data");
    return s;
}

// ---- phase update -----------------------------------------------------------------

ScalarField Simulator::ch_regular(const SimState& s, double dt,
                                  StepReport& rep) const {
    const double m0 = cfg_.mobility.m0;
    const double S = audit_.stabilization;

    // explicit part of the shifted chemical potential
    ScalarField w = plan_.convolve(s.phi);
    w *= -1.0;
    for (int j = 0; j < cfg_.grid.ny; ++j)
        for (int i = 0; i < cfg_.grid.nx; ++i)
            w(i, j) += cfg_.potential.df(s.phi(i, j)) - S * s.phi(i, j);

    ScalarField rhs = poisson_.apply(w);
    rhs *= -dt * m0;
    ScalarField adv = advect_scalar(s.u, s.phi);
    adv *= -dt;
    rhs += adv;
    rhs += s.phi;

    ScalarField c = plan_.a_field();
    c += S;
    int iters = 0;
    ScalarField phi_new =
        solve_helmholtz_center(poisson_, c, dt * m0, rhs, cfg_.scheme.tol,
                               cfg_.scheme.max_iter, &iters);
    rep.ch_iterations += iters;
    return phi_new;
}

ScalarField Simulator::ch_implicit(const SimState& s, double dt,
                                   StepReport& rep) const {
    const SchemeSpec& sch = cfg_.scheme;

    // explicit pieces: advection and the nonlocal drift, both at time n
    FluxParts parts = flux_parts(plan_, cfg_.potential, cfg_.mobility, s.phi);
    ScalarField rhs = divergence(parts.drift);
    rhs *= dt;
    ScalarField adv = advect_scalar(s.u, s.phi);
    adv *= -dt;
    rhs += adv;
    rhs += s.phi;

    // frozen-coefficient sweeps on the implicit diffusion coefficient
    ScalarField iter = s.phi;
    double prev_res = std::numeric_limits<double>::infinity();
    int grew = 0;
    for (int k = 0; k < sch.newton_max_iter; ++k) {
        int lin = 0;
        ScalarField next = solve_helmholtz_face(poisson_, parts.coeff, dt, rhs,
                                                sch.tol, sch.max_iter, &lin);
        rep.ch_iterations += lin;
        ++rep.newton_iterations;
        if (cfg_.singular() && max_abs(next) >= 1.0)
            throw_phase_violation(next, "phase solve iterate");

        ScalarField diff = next;
        diff -= iter;
        const double res = max_abs(diff);
        iter = std::move(next);
        if (res <= sch.newton_tol * std::max(1.0, max_abs(iter))) return iter;

        if (res > prev_res && ++grew >= 3)
            throw NewtonDiverged(rep.newton_iterations, res);
        prev_res = res;
        parts = flux_parts(plan_, cfg_.potential, cfg_.mobility, iter);
    }
    throw NewtonDiverged(rep.newton_iterations, prev_res);
}

// ---- one attempted step -------------------------------------------------------------

void Simulator::attempt(SimState& s, double dt, StepReport& rep) const {
    const Grid& g = cfg_.grid;

    const double speed = norms(s.u).linf;
    const double cfl = dt * (speed / g.hx() + speed / g.hy());
    if (cfl > cfg_.scheme.cfl) throw CFLViolation(cfl, cfg_.scheme.cfl);

    // --- phase transport ---
    const bool implicit_path = cfg_.singular() || cfg_.degenerate();
    ScalarField phi_new = implicit_path ? ch_implicit(s, dt, rep)
                                        : ch_regular(s, dt, rep);

    const double drift = mean(phi_new) - mean(s.phi);
    if (std::abs(drift) > 1e-8) throw NonzeroMean(drift);
    phi_new += -drift;
    if (cfg_.singular() && max_abs(phi_new) >= 1.0)
        throw_phase_violation(phi_new, "phase update");

    // --- momentum ---
    ScalarField nu_c = nu_center(phi_new);
    VectorField force = korteweg_force(plan_, cfg_.potential, phi_new,
                                       cfg_.scheme.korteweg);
    force += h_;
    VectorField adv = advect_velocity(s.u, s.u);
    adv *= -1.0;
    force += adv;
    force *= dt;
    force += s.u;  // u* = u + dt (K + h - A(u)u)

    VectorField u_visc = viscous_.solve(force, nu_c, dt);
    rep.ns_iterations = viscous_.last_iterations();

    ScalarField p(g);
    VectorField u_new = leray_.project(u_visc, p);
    rep.div_inf = norms(divergence(u_new)).linf;
    if (rep.div_inf > 1e-8 * std::max(1.0, norms(u_new).linf))
        throw NoConvergence("incompressible projection", 0, rep.div_inf);

    rep.max_phi = max_abs(phi_new);
    rep.mass = mean(phi_new);

    // commit
    s.phi = std::move(phi_new);
    s.u = std::move(u_new);
    p *= 1.0 / dt;
    s.pressure = std::move(p);
    s.t += dt;
    ++s.step;
}

StepReport Simulator::step(SimState& s) { return step(s, cfg_.scheme.dt); }

StepReport Simulator::step(SimState& s, double cap) {
    require_same_grid(s.phi.grid(), cfg_.grid, "step");
    double dt = std::min(cfg_.scheme.dt, cap);
    std::exception_ptr last;
    for (int attempt_no = 0; attempt_no <= cfg_.scheme.max_retries;
         ++attempt_no) {
        StepReport rep;
        rep.retries = attempt_no;
        rep.dt_used = dt;
        try {
            attempt(s, dt, rep);
            return rep;
        } catch (const CFLViolation&) {
            last = std::current_exception();
        } catch (const PhaseOutOfRange&) {
            last = std::current_exception();
        } catch (const NewtonDiverged&) {
            last = std::current_exception();
        } catch (const NoConvergence&) {
            last = std::current_exception();
        } catch (const NonzeroMean&) {
            last = std::current_exception();
        }
        dt *= 0.5;
        // the halving ladder stops at dt_min; the initial attempt may be
        // smaller when it is a landing step
        if (dt < cfg_.scheme.dt_min) break;
    }
    std::rethrow_exception(last);
}

void Simulator::advance_to(SimState& s, double t_target, const StepHook& hook) {
    const double eps = 1e-12 * std::max(1.0, std::abs(t_target));
    while (s.t < t_target - eps) {
        const StepReport rep = step(s, t_target - s.t);
        if (hook) hook(s, rep);
    }
    if (std::abs(s.t - t_target) <= eps) s.t = t_target;
}

// ---- functionals ---------------------------------------------------------------------

ScalarField Simulator::mu_of(const ScalarField& phi) const {
    return chemical_potential(plan_, cfg_.potential, phi);
}

ScalarField Simulator::nu_center(const ScalarField& phi) const {
    ScalarField nu(cfg_.grid);
    for (int j = 0; j < cfg_.grid.ny; ++j)
        for (int i = 0; i < cfg_.grid.nx; ++i)
            nu(i, j) = cfg_.viscosity.nu_of(phi(i, j));
    return nu;
}

EnergyBreakdown Simulator::energy(const SimState& s) const {
    EnergyBreakdown e;
    e.kinetic = 0.5 * dot(s.u, s.u);
    e.interaction = interaction_energy(plan_, s.phi);
    e.bulk = bulk_energy(cfg_.potential, s.phi);
    e.total = e.kinetic + e.interaction + e.bulk;
    e.work_rate = dot(h_, s.u);
    e.diss_visc = viscous_dissipation(s.u, nu_center(s.phi));

    if (!cfg_.degenerate()) {
        VectorField gmu = gradient(mu_of(s.phi));
        e.diss_chem = cfg_.mobility.m0 * dot(gmu, gmu);
    } else {
        // flux-consistent quadratic form: <q, q/m> with the same face
        // mobility used by the flux assembly
        const FluxParts parts =
            flux_parts(plan_, cfg_.potential, cfg_.mobility, s.phi);
        const VectorField q = phase_flux(parts, s.phi);
        const Grid& g = cfg_.grid;
        VectorField ratio = q;
        auto face_m = [&](double sl, double sr) {
            return cfg_.mobility.m(0.5 * (sl + sr));
        };
        for (int j = 0; j < g.ny; ++j)
            for (int i = 1; i < g.nx; ++i)
                ratio.ux(i, j) /= std::max(face_m(s.phi(i - 1, j), s.phi(i, j)),
                                           1e-300);
        for (int j = 1; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                ratio.uy(i, j) /= std::max(face_m(s.phi(i, j - 1), s.phi(i, j)),
                                           1e-300);
        if (g.periodic()) {
            for (int j = 0; j < g.ny; ++j)
                ratio.ux(0, j) /=
                    std::max(face_m(s.phi(g.nx - 1, j), s.phi(0, j)), 1e-300);
            for (int i = 0; i < g.nx; ++i)
                ratio.uy(i, 0) /=
                    std::max(face_m(s.phi(i, g.ny - 1), s.phi(i, 0)), 1e-300);
            ratio.sync_periodic();
        }
        // box wall faces carry zero flux, so they contribute nothing
        e.diss_chem = dot(q, ratio);
    }
    return e;
}

// ---- checkpointing ---------------------------------------------------------------------

void write_checkpoint(const std::string& prefix, const SimState& s,
                      const std::string& config_hash) {
    write_snapshot(prefix + ".u.snap", s.u);
    write_snapshot(prefix + ".phi.snap", s.phi);
    std::ofstream out(prefix + ".ckpt", std::ios::binary);
    if (!out) throw IoError("cannot write checkpoint manifest '" + prefix + ".ckpt'");
    out << "NLCHNS-CKPT1\n"
        << "config=" << config_hash << '\n'
        << "t=" << format_double(s.t) << '\n'
        << "step=" << s.step << '\n';
    if (!out) throw IoError("checkpoint manifest write failed");
}

SimState read_checkpoint(const std::string& prefix,
                         const std::string& expect_hash) {
    std::ifstream in(prefix + ".ckpt", std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint manifest '" + prefix + ".ckpt'");
    std::string line;
    if (!std::getline(in, line) || line != "NLCHNS-CKPT1")
        throw FormatError("bad checkpoint magic", 0);
    SimState s;
    std::string stored_hash;
    bool have_t = false, have_step = false;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw FormatError("bad checkpoint line", 0);
        const std::string key = line.substr(0, eq);
        const std::string val = line.substr(eq + 1);
        if (key == "config") {
            stored_hash = val;
        } else if (key == "t") {
            s.t = parse_double(val);
            have_t = true;
        } else if (key == "step") {
            s.step = std::stoull(val);
            have_step = true;
        } else {
            throw FormatError("unknown checkpoint key '" + key + "'", 0);
        }
    }
    if (!have_t || !have_step)
        throw FormatError("incomplete checkpoint manifest", 0);
    if (!expect_hash.empty() && stored_hash != expect_hash)
        throw ConfigError("checkpoint was written for config " + stored_hash +
                          ", not " + expect_hash);

    Snapshot su = read_snapshot(prefix + ".u.snap");
    Snapshot sphi = read_snapshot(prefix + ".phi.snap");
    if (!su.is_vector || sphi.is_vector)
        throw FormatError("checkpoint snapshot kinds are swapped", 0);
    require_same_grid(su.grid(), sphi.grid(), "checkpoint");
    s.u = std::move(su.vector);
    s.phi = std::move(sphi.scalar);
    s.pressure = ScalarField(s.phi.grid());
    return s;
}

}  // namespace nlchns
