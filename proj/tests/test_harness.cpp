// Experiment-harness tests: twin separations against closed-form behavior
// (zero perturbation, exact mean-gap conservation, quadratic collapse),
// refinement ladders on smooth runs, the long-horizon dissipative fit, and
// the rank-correlation utility against hand-computed values.

#include <cmath>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "nlchns/harness.hpp"

using namespace nlchns;

namespace {

SimConfig smooth_base() {
    SimConfig c;
    c.grid = Grid{32, 32, 1.0, 1.0, BoundaryMode::Periodic};
    c.kernel.family = KernelFamily::Gaussian;
    c.kernel.eps = 0.08;
    c.kernel.scale = 4.3;
    c.potential.kind = PotentialKind::DoubleWell;
    c.viscosity.nu = 0.1;
    c.scheme.dt = 1e-3;
    c.init.phi_kind = PhaseInit::CosineMix;
    c.init.phi_mean = 0.5;
    c.init.phi_amp = 0.2;
    c.init.u_kind = VelocityInit::TaylorGreen;
    c.init.u_amp = 0.3;
    return c;
}

}  // namespace

TEST_CASE("zero perturbation keeps twins exactly together") {
    TwinExperiment exp;
    exp.base = smooth_base();
    exp.perturbation = {PerturbationKind::PhaseNoise, 0.0, true};
    exp.horizon = 0.05;
    exp.stride = 10;
    TwinReport rep = run_twin(exp);
    REQUIRE(rep.series.size() >= 3);
    for (const TwinSample& s : rep.series) {
        CHECK(s.metrics.d_weak == 0.0);
        CHECK(s.metrics.d_strong == 0.0);
        CHECK(s.metrics.mean_gap == 0.0);
    }
    CHECK(rep.d0 == 0.0);
    CHECK(rep.kappa_fit == 0.0);
    CHECK(rep.envelope_pass);
    CHECK(rep.gap_integral == 0.0);
}

TEST_CASE("phase noise respects the mean-preserving contract") {
    TwinExperiment exp;
    exp.base = smooth_base();
    exp.perturbation = {PerturbationKind::PhaseNoise, 1e-4, true};
    exp.horizon = 0.02;
    exp.stride = 5;
    TwinReport rep = run_twin(exp);
    CHECK(rep.series.front().metrics.mean_gap <= 1e-14);
    CHECK(rep.d0 > 0.0);
    CHECK(rep.envelope_pass);
    CHECK(std::isfinite(rep.kappa_fit));

    // mass conservation pins the mean gap for the whole run
    exp.perturbation.mean_preserving = false;
    rep = run_twin(exp);
    for (const TwinSample& s : rep.series)
        CHECK(s.metrics.mean_gap ==
              doctest::Approx(0.5e-4).epsilon(1e-10));
}

TEST_CASE("separation scales quadratically in the perturbation size") {
    TwinExperiment exp;
    exp.base = smooth_base();
    exp.perturbation = {PerturbationKind::PhaseNoise, 0.0, true};
    exp.horizon = 0.2;
    exp.stride = 20;
    CollapseReport rep = run_collapse(exp, {1e-4, 1e-6, 1e-8});
    REQUIRE(rep.runs.size() == 3);
    for (const TwinReport& r : rep.runs) {
        CHECK(r.envelope_pass);
        CHECK(r.series.size() == rep.runs.front().series.size());
    }
    CHECK(rep.max_collapse_dev < 0.05);
}

TEST_CASE("velocity twins: batch determinism and rate correlation") {
    TwinExperiment exp;
    exp.base = smooth_base();
    exp.perturbation = {PerturbationKind::VelocityNoise, 1e-6, true};
    exp.horizon = 0.1;
    exp.stride = 10;

    // bitwise deterministic reports, member order fixed by construction
    std::vector<TwinReport> b1 = run_twin_batch(exp, 3);
    std::vector<TwinReport> b2 = run_twin_batch(exp, 3);
    REQUIRE(b1.size() == 3);
    for (int k = 0; k < 3; ++k) {
        CHECK(b1[k].seed == exp.base.seed + k);
        CHECK(to_json(b1[k]) == to_json(b2[k]));
    }

    // stronger base flow raises both the fitted rate and the integrand
    std::vector<double> kappas, betas;
    for (int k = 0; k < 10; ++k) {
        TwinExperiment member = exp;
        member.base.seed = 42 + k;
        member.base.init.u_amp = 0.1 + 0.08 * k;
        TwinReport r = run_twin(member);
        CHECK(r.envelope_pass);
        kappas.push_back(r.kappa_fit);
        betas.push_back(r.beta_integral);
    }
    CHECK(spearman_rho(kappas, betas) > 0.0);
}

TEST_CASE("mean shifts separate twins monotonically") {
    std::vector<double> finals;
    for (double d : {0.0, 1e-4, 1e-3}) {
        TwinExperiment exp;
        exp.base = smooth_base();
        exp.perturbation = {PerturbationKind::MeanShift, d, true};
        exp.horizon = 0.05;
        exp.stride = 10;
        TwinReport rep = run_twin(exp);
        for (const TwinSample& s : rep.series)
            CHECK(s.metrics.mean_gap == doctest::Approx(d).epsilon(1e-10));
        finals.push_back(rep.series.back().metrics.d_weak);
    }
    CHECK(finals[0] == 0.0);
    CHECK(finals[1] > finals[0]);
    CHECK(finals[2] > finals[1]);
}

TEST_CASE("forcing gaps grow inside a linear-in-time envelope") {
    TwinExperiment exp;
    exp.base = smooth_base();
    exp.perturbation = {PerturbationKind::ForcingGap, 1e-3, true};
    exp.horizon = 0.05;
    exp.stride = 5;
    TwinReport rep = run_twin(exp);
    CHECK(rep.d0 == 0.0);
    CHECK(rep.series.back().metrics.d_weak > 0.0);
    CHECK(rep.forcing_envelope > 0.0);
    CHECK(std::isfinite(rep.forcing_envelope));
    CHECK(rep.envelope_pass);
}

TEST_CASE("spatial ladder converges at second order") {
    RefinementStudy study;
    study.base = smooth_base();
    study.base.grid = Grid{32, 32, 1.0, 1.0, BoundaryMode::Periodic};
    study.base.kernel.eps = 0.15;  // resolved on the coarsest level
    study.base.scheme.dt = 2.5e-4;
    study.axis = RefinementAxis::Spatial;
    study.levels = 3;
    study.reference_extra = 1;  // dedicated 128^2 reference
    study.t_end = 0.02;
    RefinementTable t = run_refinement(study);
    REQUIRE(t.rows.size() == 3);
    REQUIRE(t.orders_phi.size() == 2);
    CHECK(t.monotone);
    for (double o : t.orders_phi) CHECK(o >= 1.9);

    // random initial data cannot ride a spatial ladder
    RefinementStudy bad = study;
    bad.base.init.phi_kind = PhaseInit::RandomSmooth;
    CHECK_THROWS_AS(run_refinement(bad), ConfigError);
    RefinementStudy shallow = study;
    shallow.levels = 2;
    CHECK_THROWS_AS(run_refinement(shallow), ConfigError);
}

TEST_CASE("temporal ladder converges at first order") {
    RefinementStudy study;
    study.base = smooth_base();
    study.base.scheme.dt = 1e-3;
    study.axis = RefinementAxis::Temporal;
    study.levels = 3;
    study.reference_extra = 0;  // consecutive-difference mode
    study.t_end = 0.02;
    RefinementTable t = run_refinement(study);
    REQUIRE(t.rows.size() == 2);
    REQUIRE(t.orders_phi.size() == 1);
    CHECK(t.monotone);
    CHECK(t.orders_phi.front() >= 0.9);
}

TEST_CASE("long-horizon run fits a decaying envelope and plateaus") {
    SimConfig c = smooth_base();
    c.grid = Grid{24, 24, 1.0, 1.0, BoundaryMode::Periodic};
    c.init.phi_kind = PhaseInit::RandomSmooth;
    c.init.phi_mean = 0.0;
    c.init.phi_amp = 0.2;
    c.init.phi_kmax = 4;
    c.init.u_kind = VelocityInit::Zero;
    c.scheme.dt = 4e-3;
    c.scheme.t_end = 100.0;

    SimConfig short_run = c;
    short_run.scheme.t_end = 10.0;
    CHECK_THROWS_AS(run_longtime(short_run, 0.5), TrajectoryTooShort);

    LongtimeReport rep = run_longtime(c, 0.5);
    CHECK(rep.fit.ok);
    CHECK(rep.fit.k_fit > 0.0);
    CHECK(std::isfinite(rep.fit.K_fit));
    CHECK(rep.t_star < 100.0);
    CHECK(rep.plateau_grad_u >= 0.0);
    CHECK(rep.plateau_grad_phi > 0.0);
    CHECK(rep.log.samples().size() == 201);

    // energy decays overall: final below initial
    const auto& ss = rep.log.samples();
    CHECK(ss.back().energy.total < ss.front().energy.total);
}

TEST_CASE("rank correlation matches hand-computed values") {
    CHECK(spearman_rho({1, 2, 3, 4}, {10, 20, 30, 40}) ==
          doctest::Approx(1.0));
    CHECK(spearman_rho({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
    // ties get average ranks: x = (1, 1, 2), y = (1, 2, 3) ->
    // rank_x = (1.5, 1.5, 3), rank_y = (1, 2, 3), rho = sqrt(3)/2
    CHECK(spearman_rho({1, 1, 2}, {1, 2, 3}) ==
          doctest::Approx(std::sqrt(3.0) / 2.0));
    CHECK(spearman_rho({1, 1}, {2, 2}) == 0.0);  // degenerate: no variance
    CHECK_THROWS_AS(spearman_rho({1, 2}, {1}), ConfigError);
}

TEST_CASE("reports serialize to parseable deterministic JSON") {
    TwinExperiment exp;
    exp.base = smooth_base();
    exp.perturbation = {PerturbationKind::PhaseNoise, 1e-6, true};
    exp.horizon = 0.01;
    exp.stride = 5;
    TwinReport rep = run_twin(exp);
    const std::string text = to_json(rep);
    CHECK(text == to_json(rep));
    const nlohmann::json j = nlohmann::json::parse(text);
    CHECK(j["type"] == "twin");
    CHECK(j["metric"] == "weak");
    CHECK(j.contains("kappa_fit"));
    CHECK(j["samples"].size() == rep.series.size());
    CHECK(j["samples"][0]["d_weak"].get<double>() == rep.series[0].metrics.d_weak);
}
