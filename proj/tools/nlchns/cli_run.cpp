#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "common.hpp"
#include "nlchns/diagnostics.hpp"
#include "nlchns/errors.hpp"
#include "nlchns/sim.hpp"
#include "nlchns/snapshot.hpp"

namespace nlcli {

using namespace nlchns;
namespace fs = std::filesystem;

namespace {

std::string indexed(const std::string& dir, const char* stem, int k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s_%04d.snap", stem, k);
    return dir + "/" + buf;
}

/// Diagnostics stride bucket of a time point; sample_dt = 0 means every step.
long sample_index(double t, double sample_dt) {
    if (sample_dt <= 0.0) return -1;
    return static_cast<long>(std::floor(t / sample_dt + 1e-9));
}

}  // namespace

int cmd_run(const RunOptions& opt) {
    const SimConfig cfg = load_config(opt.config_path);
    Simulator sim(cfg);  // runs the assumption audit; throws ConfigError
    const std::string hash = config_hash(cfg);

    std::error_code ec;
    fs::create_directories(opt.out_dir, ec);
    if (ec) throw IoError("cannot create directory: " + opt.out_dir);

    // Reproducibility surface first: manifest and canonical config are on
    // disk before the first step.
    write_text_file(opt.out_dir + "/manifest.json",
                    manifest_json(cfg, sim.assumptions()));
    write_text_file(opt.out_dir + "/config.txt", serialize_config(cfg));

    SimState s = opt.restart_prefix.empty()
                     ? sim.make_initial()
                     : read_checkpoint(opt.restart_prefix, hash);
    const double t_end = cfg.scheme.t_end;

    // Field snapshots live on an absolute schedule over [0, t_end] so a
    // restarted run emits the same remaining files as the uninterrupted one.
    const int nsnap = cfg.output.snapshot_count;
    std::vector<std::pair<double, int>> snaps;  // (time, index)
    for (int k = 1; k <= nsnap; ++k)
        snaps.emplace_back(t_end * k / nsnap, k);
    if (nsnap > 0 && s.t == 0.0) {
        write_snapshot(indexed(opt.out_dir, "phi", 0), s.phi);
        write_snapshot(indexed(opt.out_dir, "u", 0), s.u);
    }

    TrajectoryLog log;
    log.add(measure(sim, s));
    const double sample_dt = cfg.output.sample_dt;
    long last_idx = sample_index(s.t, sample_dt);
    const StepHook hook = [&](const SimState& st, const StepReport&) {
        if (sample_dt <= 0.0) {
            log.add(measure(sim, st));
            return;
        }
        const long idx = sample_index(st.t, sample_dt);
        if (idx > last_idx) {
            log.add(measure(sim, st));
            last_idx = idx;
        }
    };

    for (const auto& [t_snap, k] : snaps) {
        if (t_snap <= s.t) continue;
        sim.advance_to(s, t_snap, hook);
        write_snapshot(indexed(opt.out_dir, "phi", k), s.phi);
        write_snapshot(indexed(opt.out_dir, "u", k), s.u);
        // Rolling checkpoint: an interrupted run resumes from here with
        // --restart <dir>/last and the identical config.
        write_checkpoint(opt.out_dir + "/last", s, hash);
    }
    if (s.t < t_end) sim.advance_to(s, t_end, hook);
    if (log.samples().back().t < s.t) log.add(measure(sim, s));

    write_csv(opt.out_dir + "/diagnostics.csv", trajectory_rows(log));
    write_checkpoint(opt.out_dir + "/final", s, hash);

    const TrajectorySample& fin = log.samples().back();
    std::cout << "run complete: t=" << format_double(s.t)
              << " steps=" << s.step
              << " E_total=" << format_double(fin.energy.total)
              << " mass=" << format_double(fin.mass)
              << " max_phi=" << format_double(fin.max_phi) << "\n";
    return 0;
}

}  // namespace nlcli
