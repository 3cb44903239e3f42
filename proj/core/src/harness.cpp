#include "nlchns/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"
#include "nlchns/ops.hpp"
#include "nlchns/snapshot.hpp"

namespace nlchns {

namespace {

using nlohmann::json;

/// Perturbation noise draws from the dedicated child stream (index 2;
/// velocity/phase initialization use 0 and 1).
constexpr std::uint64_t kPerturbationChild = 2;

SimConfig forcing_gap_config(const SimConfig& base, double eps) {
    SimConfig out = base;
    switch (out.forcing.kind) {
        case ForcingKind::Zero:
            out.forcing.kind = ForcingKind::FourierBody;
            out.forcing.kx = 1;
            out.forcing.ky = 1;
            out.forcing.amp = eps;
            break;
        case ForcingKind::ConstantVector:
            out.forcing.fx += eps;
            break;
        case ForcingKind::FourierBody:
            out.forcing.amp += eps;
            break;
    }
    return out;
}

void apply_state_perturbation(SimState& s, const SimConfig& cfg,
                              const Perturbation& p) {
    if (p.eps == 0.0) return;
    Rng noise(child_seed(cfg.seed, kPerturbationChild));
    switch (p.kind) {
        case PerturbationKind::VelocityNoise:
            s.u += random_solenoidal(cfg.grid, noise, 8, p.eps);
            break;
        case PerturbationKind::PhaseNoise:
            s.phi += random_smooth(cfg.grid, noise, 8, p.eps);
            if (!p.mean_preserving) s.phi += 0.5 * p.eps;
            break;
        case PerturbationKind::MeanShift:
            s.phi += p.eps;
            break;
        case PerturbationKind::ForcingGap:
            break;  // handled at the config level
    }
}

double trapezoid(const std::vector<double>& t, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < t.size(); ++i)
        s += 0.5 * (y[i] + y[i + 1]) * (t[i + 1] - t[i]);
    return s;
}

json twin_json(const TwinReport& r) {
    json samples = json::array();
    for (const TwinSample& s : r.series)
        samples.push_back({{"t", s.t},
                           {"d_weak", s.metrics.d_weak},
                           {"d_strong", s.metrics.d_strong},
                           {"mean_gap", s.metrics.mean_gap},
                           {"beta", s.metrics.beta_integrand}});
    return json{{"type", "twin"},
                {"metric", r.weak_metric ? "weak" : "strong"},
                {"seed", r.seed},
                {"d0", r.d0},
                {"kappa_fit", r.kappa_fit},
                {"envelope_pass", r.envelope_pass},
                {"forcing_envelope", r.forcing_envelope},
                {"gap_integral", r.gap_integral},
                {"beta_integral", r.beta_integral},
                {"samples", samples}};
}

/// Conservative block-average restriction onto a coarser grid.
ScalarField restrict_phi(const ScalarField& fine, const Grid& coarse) {
    const Grid& gf = fine.grid();
    const int r = gf.nx / coarse.nx;
    ScalarField out(coarse);
    const double w = 1.0 / (r * r);
    for (int j = 0; j < coarse.ny; ++j)
        for (int i = 0; i < coarse.nx; ++i) {
            double s = 0.0;
            for (int b = 0; b < r; ++b)
                for (int a = 0; a < r; ++a) s += fine(i * r + a, j * r + b);
            out(i, j) = s * w;
        }
    return out;
}

/// Face restriction: coarse faces are co-located with every r-th fine face;
/// average the r fine faces sharing the coarse face's line segment.
VectorField restrict_u(const VectorField& fine, const Grid& coarse) {
    const Grid& gf = fine.grid();
    const int r = gf.nx / coarse.nx;
    VectorField out(coarse);
    const int nxf = coarse.periodic() ? coarse.nx : coarse.nx + 1;
    const int nyf = coarse.periodic() ? coarse.ny : coarse.ny + 1;
    for (int j = 0; j < coarse.ny; ++j)
        for (int i = 0; i < nxf; ++i) {
            double s = 0.0;
            for (int b = 0; b < r; ++b) s += fine.ux(i * r, j * r + b);
            out.ux(i, j) = s / r;
        }
    for (int j = 0; j < nyf; ++j)
        for (int i = 0; i < coarse.nx; ++i) {
            double s = 0.0;
            for (int a = 0; a < r; ++a) s += fine.uy(i * r + a, j * r);
            out.uy(i, j) = s / r;
        }
    out.enforce_bc();
    return out;
}

struct LevelResult {
    Grid grid;
    ScalarField phi;
    VectorField u;
    LevelResult(const Grid& g) : grid(g), phi(g), u(g) {}
};

LevelResult run_level(const SimConfig& cfg, double t_end) {
    Simulator sim(cfg);
    SimState s = sim.make_initial();
    sim.advance_to(s, t_end);
    LevelResult r(cfg.grid);
    r.phi = s.phi;
    r.u = s.u;
    return r;
}

/// L2 distances after restricting the finer state onto the coarser grid.
void level_errors(const LevelResult& coarse, const LevelResult& fine,
                  double& err_phi, double& err_u) {
    ScalarField dphi = restrict_phi(fine.phi, coarse.grid);
    dphi -= coarse.phi;
    VectorField du = restrict_u(fine.u, coarse.grid);
    du -= coarse.u;
    err_phi = norms(dphi).l2;
    err_u = norms(du).l2;
}

}  // namespace

// ---- twin experiments ----------------------------------------------------------

TwinReport run_twin(const TwinExperiment& exp) {
    const SimConfig& base = exp.base;
    const bool forcing_gap =
        exp.perturbation.kind == PerturbationKind::ForcingGap;
    const SimConfig cfg_b =
        forcing_gap ? forcing_gap_config(base, exp.perturbation.eps) : base;

    Simulator sim_a(base);
    Simulator sim_b(cfg_b);
    SimState a = sim_a.make_initial();
    SimState b = sim_b.make_initial();
    if (!forcing_gap) apply_state_perturbation(b, base, exp.perturbation);

    TwinReport rep;
    rep.weak_metric = !base.variable_viscosity();
    rep.seed = base.seed;

    std::vector<double> times, gaps, betas;
    auto record = [&](double t) {
        TwinSample s;
        s.t = t;
        s.metrics = contraction_metrics(a, b, sim_a);
        rep.series.push_back(s);
        ScalarField dphi = a.phi;
        dphi -= b.phi;
        VectorField du = a.u;
        du -= b.u;
        times.push_back(t);
        gaps.push_back(dot(dphi, dphi) +
                       norms(du).h1_semi * norms(du).h1_semi);
        betas.push_back(s.metrics.beta_integrand);
    };
    record(0.0);

    const double eps_t = 1e-12 * std::max(1.0, std::abs(exp.horizon));
    const int stride = std::max(1, exp.stride);
    int k = 0;
    while (a.t < exp.horizon - eps_t) {
        sim_a.step(a, exp.horizon - a.t);
        sim_b.step(b, exp.horizon - b.t);
        if (std::abs(a.t - b.t) > eps_t)
            throw NoConvergence("twin lockstep", k, std::abs(a.t - b.t));
        ++k;
        if (k % stride == 0 || a.t >= exp.horizon - eps_t) record(a.t);
    }

    rep.gap_integral = trapezoid(times, gaps);
    rep.beta_integral = trapezoid(times, betas);

    auto dist = [&](const TwinSample& s) {
        return rep.weak_metric ? s.metrics.d_weak : s.metrics.d_strong;
    };
    rep.d0 = dist(rep.series.front());
    if (rep.d0 > 0.0) {
        bool found = false;
        for (const TwinSample& s : rep.series)
            if (s.t > 0.0 && dist(s) > 0.0) {
                const double rate = std::log(dist(s) / rep.d0) / s.t;
                rep.kappa_fit = found ? std::max(rep.kappa_fit, rate) : rate;
                found = true;
            }
        rep.envelope_pass = true;
        for (const TwinSample& s : rep.series)
            if (dist(s) >
                rep.d0 * std::exp(rep.kappa_fit * s.t) * (1.0 + 1e-9))
                rep.envelope_pass = false;
    } else if (forcing_gap) {
        VectorField dh = body_force(base.grid, cfg_b.forcing);
        dh -= body_force(base.grid, base.forcing);
        const double dh2 = dot(dh, dh);
        for (const TwinSample& s : rep.series)
            if (s.t > 0.0 && dh2 > 0.0)
                rep.forcing_envelope =
                    std::max(rep.forcing_envelope, dist(s) / (s.t * dh2));
        rep.envelope_pass = true;
        for (const TwinSample& s : rep.series)
            if (dist(s) >
                rep.forcing_envelope * s.t * dh2 * (1.0 + 1e-9) + 1e-300)
                rep.envelope_pass = false;
    } else {
        rep.envelope_pass = std::all_of(
            rep.series.begin(), rep.series.end(),
            [&](const TwinSample& s) { return dist(s) == 0.0; });
    }
    return rep;
}

CollapseReport run_collapse(const TwinExperiment& exp,
                            const std::vector<double>& eps_list) {
    CollapseReport rep;
    rep.eps = eps_list;
    for (double e : eps_list) {
        TwinExperiment run = exp;
        run.perturbation.eps = e;
        rep.runs.push_back(run_twin(run));
    }
    auto dist = [&](const TwinReport& r, std::size_t i) {
        return r.weak_metric ? r.series[i].metrics.d_weak
                             : r.series[i].metrics.d_strong;
    };
    for (std::size_t p = 0; p < rep.runs.size(); ++p)
        for (std::size_t q = p + 1; q < rep.runs.size(); ++q) {
            const std::size_t n =
                std::min(rep.runs[p].series.size(), rep.runs[q].series.size());
            for (std::size_t i = 0; i < n; ++i) {
                const double dp = dist(rep.runs[p], i) /
                                  (rep.eps[p] * rep.eps[p]);
                const double dq = dist(rep.runs[q], i) /
                                  (rep.eps[q] * rep.eps[q]);
                if (dp > 0.0 && dq > 0.0)
                    rep.max_collapse_dev = std::max(
                        rep.max_collapse_dev, std::abs(dp / dq - 1.0));
            }
        }
    return rep;
}

std::vector<TwinReport> run_twin_batch(const TwinExperiment& exp, int count) {
    std::vector<TwinReport> out;
    out.reserve(count);
    for (int k = 0; k < count; ++k) {
        TwinExperiment member = exp;
        member.base.seed = exp.base.seed + static_cast<std::uint64_t>(k);
        out.push_back(run_twin(member));
    }
    return out;
}

// ---- refinement ladders ---------------------------------------------------------

RefinementTable run_refinement(const RefinementStudy& study) {
    if (study.levels < 3)
        throw ConfigError("refinement ladder needs at least 3 levels");
    if (study.reference_extra < 0)
        throw ConfigError("reference_extra must be nonnegative");
    if (study.axis == RefinementAxis::Spatial &&
        (study.base.init.u_kind == VelocityInit::RandomSolenoidal ||
         study.base.init.phi_kind == PhaseInit::RandomSmooth))
        throw ConfigError(
            "spatial refinement needs grid-independent analytic initial data");

    RefinementTable table;
    table.axis = study.axis;

    std::vector<LevelResult> states;
    std::vector<double> params;
    const int total = study.levels + (study.reference_extra > 0 ? 1 : 0);
    for (int k = 0; k < total; ++k) {
        SimConfig cfg = study.base;
        const int halvings = (k == study.levels)
                                 ? study.levels - 1 + study.reference_extra
                                 : k;
        if (study.axis == RefinementAxis::Spatial) {
            const int f = 1 << halvings;
            cfg.grid = Grid{study.base.grid.nx * f, study.base.grid.ny * f,
                            study.base.grid.lx, study.base.grid.ly,
                            study.base.grid.bc};
        } else {
            cfg.scheme.dt = study.base.scheme.dt / (1 << halvings);
        }
        states.push_back(run_level(cfg, study.t_end));
        if (k < study.levels)
            params.push_back(study.axis == RefinementAxis::Spatial
                                 ? cfg.grid.lx / cfg.grid.nx
                                 : cfg.scheme.dt);
    }

    // rows: level k against the dedicated reference (if any) or against the
    // next-finer level (consecutive-difference mode)
    const int rows = study.reference_extra > 0 ? study.levels
                                               : study.levels - 1;
    for (int k = 0; k < rows; ++k) {
        const LevelResult& ref =
            study.reference_extra > 0 ? states.back() : states[k + 1];
        RefinementRow row;
        row.param = params[k];
        level_errors(states[k], ref, row.err_phi, row.err_u);
        table.rows.push_back(row);
    }
    table.monotone = true;
    for (std::size_t k = 0; k + 1 < table.rows.size(); ++k) {
        const double r0 = table.rows[k].err_phi;
        const double r1 = table.rows[k + 1].err_phi;
        if (!(r1 < r0)) table.monotone = false;
        const double ratio = table.rows[k].param / table.rows[k + 1].param;
        table.orders_phi.push_back(std::log(r0 / r1) / std::log(ratio));
    }
    return table;
}

// ---- long-horizon dissipation ----------------------------------------------------

LongtimeReport run_longtime(const SimConfig& cfg, double sample_dt) {
    if (cfg.scheme.t_end < 100.0)
        throw TrajectoryTooShort(
            "long-horizon audit needs t_end >= 100, got " +
            format_double(cfg.scheme.t_end));
    if (sample_dt <= 0.0) throw ConfigError("sample_dt must be positive");

    Simulator sim(cfg);
    SimState s = sim.make_initial();

    LongtimeReport rep;
    rep.floor_level =
        cfg.potential.f(mean(s.phi)) * cfg.grid.lx * cfg.grid.ly;
    rep.log.add(measure(sim, s));
    const long nsamples =
        std::lround(std::ceil(cfg.scheme.t_end / sample_dt - 1e-9));
    for (long k = 1; k <= nsamples; ++k) {
        sim.advance_to(s, std::min(k * sample_dt, cfg.scheme.t_end));
        rep.log.add(measure(sim, s));
    }

    rep.fit = dissipative_check(rep.log, rep.floor_level);

    // plateau scan over the gradient norms
    const auto& ss = rep.log.samples();
    const double t0 = ss.front().t;
    const double span = rep.log.duration();
    double pu = 0.0, pphi = 0.0;
    for (const TrajectorySample& smp : ss)
        if (smp.t >= t0 + 0.8 * span) {
            pu = std::max(pu, smp.u_norms.h1_semi);
            pphi = std::max(pphi, smp.grad_phi_norms.l4);
        }
    rep.plateau_grad_u = 1.05 * pu + 1e-12;
    rep.plateau_grad_phi = 1.05 * pphi + 1e-12;

    double run_u = 0.0, run_phi = 0.0;
    rep.t_star = ss.front().t;
    for (std::size_t i = ss.size(); i-- > 0;) {
        run_u = std::max(run_u, ss[i].u_norms.h1_semi);
        run_phi = std::max(run_phi, ss[i].grad_phi_norms.l4);
        if (run_u <= rep.plateau_grad_u && run_phi <= rep.plateau_grad_phi)
            rep.t_star = ss[i].t;
        else
            break;
    }
    return rep;
}

// ---- report serialization ---------------------------------------------------------

std::string to_json(const TwinReport& r) { return twin_json(r).dump(2) + "\n"; }

std::string to_json(const CollapseReport& r) {
    json runs = json::array();
    for (const TwinReport& run : r.runs) runs.push_back(twin_json(run));
    return json{{"type", "collapse"},
                {"eps", r.eps},
                {"max_collapse_dev", r.max_collapse_dev},
                {"runs", runs}}
               .dump(2) +
           "\n";
}

std::string to_json(const RefinementTable& t) {
    json rows = json::array();
    for (const RefinementRow& r : t.rows)
        rows.push_back(
            {{"param", r.param}, {"err_phi", r.err_phi}, {"err_u", r.err_u}});
    return json{{"type", "refinement"},
                {"axis",
                 t.axis == RefinementAxis::Spatial ? "spatial" : "temporal"},
                {"rows", rows},
                {"orders_phi", t.orders_phi},
                {"monotone", t.monotone}}
               .dump(2) +
           "\n";
}

std::string to_json(const LongtimeReport& r) {
    const auto& ss = r.log.samples();
    return json{{"type", "longtime"},
                {"samples", ss.size()},
                {"t_end", ss.empty() ? 0.0 : ss.back().t},
                {"floor_level", r.floor_level},
                {"k_fit", r.fit.k_fit},
                {"K_fit", r.fit.K_fit},
                {"fit_ok", r.fit.ok},
                {"t_star", r.t_star},
                {"plateau_grad_u", r.plateau_grad_u},
                {"plateau_grad_phi", r.plateau_grad_phi},
                {"final_energy", ss.empty() ? 0.0 : ss.back().energy.total}}
               .dump(2) +
           "\n";
}

double spearman_rho(const std::vector<double>& x,
                    const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw ConfigError("rank correlation needs two equal-length series");
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> idx(v.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> r(v.size());
        std::size_t i = 0;
        while (i < idx.size()) {
            std::size_t j = i;
            while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
            const double avg = 0.5 * (i + j) + 1.0;  // average rank of ties
            for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
            i = j + 1;
        }
        return r;
    };
    const std::vector<double> rx = ranks(x), ry = ranks(y);
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace nlchns
