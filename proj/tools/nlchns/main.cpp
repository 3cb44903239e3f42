// Command-line front end for the nonlocal two-phase flow solver.
//
// Subcommands: run, twin, audit, opscheck, longtime, refine.
// Exit codes: 0 ok, 2 configuration error, 3 numerical failure,
// 4 I/O or format error.  NLCHNS_THREADS is recorded in run manifests;
// the solver itself is serial and deterministic.

#include <iostream>

#include "CLI11.hpp"
#include "common.hpp"
#include "nlchns/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"nonlocal Cahn-Hilliard / Navier-Stokes verification tool"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("nlchns ") + nlcli::kVersion);

    nlcli::RunOptions run;
    CLI::App* c_run = app.add_subcommand(
        "run", "integrate a configuration and emit manifest, diagnostics "
               "CSV, snapshots, and a final checkpoint");
    c_run->add_option("config", run.config_path, "config file")->required();
    c_run->add_option("-o,--out", run.out_dir, "output directory")->required();
    c_run->add_option("--restart", run.restart_prefix,
                      "checkpoint prefix to resume from (config must hash "
                      "to the stored value)");

    nlcli::TwinOptions twin;
    CLI::App* c_twin = app.add_subcommand(
        "twin", "integrate a perturbed twin pair and audit the separation "
                "envelope");
    c_twin->add_option("config", twin.config_path, "config file")->required();
    c_twin->add_option("-o,--out", twin.out_path, "report path ('-' = stdout)");
    c_twin->add_option("--mode", twin.mode,
                       "velocity | phase | phase-meanzero | mean-shift | "
                       "forcing");
    c_twin->add_option("--eps", twin.eps, "perturbation magnitude");
    c_twin->add_option("--horizon", twin.horizon, "compared time span");
    c_twin->add_option("--stride", twin.stride, "steps between samples");
    c_twin->add_option("--collapse", twin.collapse,
                       "magnitudes for the scaling-collapse audit")
        ->delimiter(',');

    nlcli::AuditOptions audit;
    CLI::App* c_audit = app.add_subcommand(
        "audit", "recompute invariants of stored snapshots, checkpoints, or "
                 "a whole run directory");
    c_audit->add_option("config", audit.config_path, "config file")->required();
    c_audit->add_option("--dir", audit.dir, "run directory to audit");
    c_audit->add_option("--phi", audit.phi_path, "phase snapshot");
    c_audit->add_option("--u", audit.u_path, "velocity snapshot");
    c_audit->add_option("--checkpoint", audit.checkpoint_prefix,
                        "checkpoint prefix");

    nlcli::OpscheckOptions ops;
    CLI::App* c_ops = app.add_subcommand(
        "opscheck", "run the small-grid operator oracle suite and print max "
                    "deviations");
    c_ops->add_flag("--inject-fault", ops.inject_fault,
                    "corrupt one oracle input (test fixture)");

    nlcli::LongtimeOptions lt;
    CLI::App* c_lt = app.add_subcommand(
        "longtime", "fit the dissipative envelope over a long autonomous run");
    c_lt->add_option("config", lt.config_path, "config file")->required();
    c_lt->add_option("-o,--out", lt.out_path, "report path ('-' = stdout)");
    c_lt->add_option("--csv", lt.csv_path, "also write the trajectory CSV");
    c_lt->add_option("--sample-dt", lt.sample_dt, "sampling stride");

    nlcli::RefineOptions refine;
    CLI::App* c_ref = app.add_subcommand(
        "refine", "self-convergence ladder across grid or step refinement");
    c_ref->add_option("config", refine.config_path, "config file")->required();
    c_ref->add_option("-o,--out", refine.out_path, "report path ('-' = stdout)");
    c_ref->add_option("--axis", refine.axis, "spatial | temporal");
    c_ref->add_option("--levels", refine.levels, "ladder size");
    c_ref->add_option("--reference-extra", refine.reference_extra,
                      "extra halvings for the reference run");
    c_ref->add_option("--t-end", refine.t_end, "comparison time");
    c_ref->add_option("--min-order", refine.min_order,
                      "fail unless every observed order reaches this");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;  // bad invocation is a configuration error
    }

    try {
        if (*c_run) return nlcli::cmd_run(run);
        if (*c_twin) return nlcli::cmd_twin(twin);
        if (*c_audit) return nlcli::cmd_audit(audit);
        if (*c_ops) return nlcli::cmd_opscheck(ops);
        if (*c_lt) return nlcli::cmd_longtime(lt);
        if (*c_ref) return nlcli::cmd_refine(refine);
    } catch (const nlchns::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const nlchns::FormatError& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return 4;
    } catch (const nlchns::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    } catch (const nlchns::Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
