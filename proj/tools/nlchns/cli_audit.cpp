#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>

#include "common.hpp"
#include "json.hpp"
#include "nlchns/diagnostics.hpp"
#include "nlchns/errors.hpp"
#include "nlchns/ops.hpp"
#include "nlchns/sim.hpp"
#include "nlchns/snapshot.hpp"

namespace nlcli {

using namespace nlchns;
namespace fs = std::filesystem;

namespace {

bool grids_equal(const Grid& a, const Grid& b) {
    return a.nx == b.nx && a.ny == b.ny && a.lx == b.lx && a.ly == b.ly &&
           a.bc == b.bc;
}

struct Auditor {
    const Simulator& sim;
    bool all_pass = true;

    void check(const std::string& name, bool ok, const std::string& detail) {
        std::cout << "  check " << name << ": " << (ok ? "PASS" : "FAIL");
        if (!detail.empty()) std::cout << " (" << detail << ")";
        std::cout << "\n";
        if (!ok) all_pass = false;
    }

    void row(const char* name, double v) {
        std::cout << "  " << name << " = " << format_double(v) << "\n";
    }

    /// Recomputed functionals plus the invariants of one stored state.
    void state(const std::string& label, const ScalarField& phi,
               const VectorField* u) {
        const SimConfig& cfg = sim.config();
        std::cout << "audit " << label << ":\n";
        const bool grid_ok = grids_equal(phi.grid(), cfg.grid) &&
                             (!u || grids_equal(u->grid(), cfg.grid));
        check("grid matches config", grid_ok, "");
        if (!grid_ok) return;

        const double mass = mean(phi);
        const double maxphi = max_abs(phi);
        row("mass", mass);
        row("max_phi", maxphi);
        if (cfg.singular()) {
            check("phase bound max|phi| < 1", maxphi < 1.0,
                  "max|phi| = " + format_double(maxphi));
            if (maxphi >= 1.0) return;  // energy undefined outside the domain
        }

        SimState s;
        s.phi = phi;
        s.u = u ? *u : VectorField(cfg.grid);
        const EnergyBreakdown eb = sim.energy(s);
        row("E_kinetic", eb.kinetic);
        row("E_interaction", eb.interaction);
        row("E_bulk", eb.bulk);
        row("E_total", eb.total);
        check("finite energy and mass",
              std::isfinite(eb.total) && std::isfinite(mass), "");
    }
};

}  // namespace

int cmd_audit(const AuditOptions& opt) {
    const SimConfig cfg = load_config(opt.config_path);
    Simulator sim(cfg);  // assumption audit; ConfigError names any violation
    const std::string hash = config_hash(cfg);
    Auditor a{sim};

    const AssumptionReport& ar = sim.assumptions();
    std::cout << "assumption audit:\n";
    a.row("coercivity", ar.coercivity);
    a.row("c0_required", ar.c0);
    a.row("a_min", ar.a_min);
    a.row("a_star", ar.a_star);
    if (cfg.degenerate()) {
        a.row("alpha0", ar.alpha0);
        a.row("rho", ar.rho);
        a.row("b_star", ar.b_star);
        a.row("kappa_required", ar.kappa_required);
        a.row("eps0", ar.eps0);
    }
    a.check("model assumptions", ar.ok, ar.failure);

    if (!opt.phi_path.empty()) {
        Snapshot phi = read_snapshot(opt.phi_path);
        a.check("phase snapshot is scalar", !phi.is_vector, opt.phi_path);
        if (!phi.is_vector) {
            if (!opt.u_path.empty()) {
                Snapshot u = read_snapshot(opt.u_path);
                a.check("velocity snapshot is vector", u.is_vector, opt.u_path);
                if (u.is_vector) a.state(opt.phi_path, phi.scalar, &u.vector);
            } else {
                a.state(opt.phi_path, phi.scalar, nullptr);
            }
        }
    }

    if (!opt.checkpoint_prefix.empty()) {
        const SimState s = read_checkpoint(opt.checkpoint_prefix, hash);
        a.state(opt.checkpoint_prefix, s.phi, &s.u);
    }

    if (!opt.dir.empty()) {
        const std::string& dir = opt.dir;

        nlohmann::json manifest;
        try {
            manifest = nlohmann::json::parse(read_text_file(dir + "/manifest.json"));
        } catch (const nlohmann::json::parse_error& e) {
            throw FormatError("manifest.json: " + std::string(e.what()),
                              e.byte);
        }
        a.check("manifest hash matches config",
                manifest.value("config_hash", std::string()) == hash,
                "expected " + hash);

        const SimConfig stored = parse_config(read_text_file(dir + "/config.txt"));
        a.check("stored config round-trips to the same hash",
                config_hash(stored) == hash, "");

        const auto rows = read_csv(dir + "/diagnostics.csv");
        std::cout << "  diagnostics.csv rows = " << rows.size() << "\n";
        a.check("diagnostics nonempty", !rows.empty(), "");
        if (!rows.empty()) {
            double drift = 0.0;
            for (const CsvRow& r : rows)
                drift = std::max(drift, std::abs(r.mass - rows.front().mass));
            a.check("mass drift <= 1e-12", drift <= 1e-12,
                    "drift = " + format_double(drift));
        }

        // Every snapshot the run emitted must read back and pass the state
        // audit (velocities paired with phases by index where present).
        std::map<std::string, std::string> phis, us;
        for (const auto& entry : fs::directory_iterator(dir)) {
            const std::string name = entry.path().filename().string();
            if (name.size() > 5 && name.substr(name.size() - 5) == ".snap") {
                if (name.rfind("phi_", 0) == 0)
                    phis[name.substr(4)] = entry.path().string();
                else if (name.rfind("u_", 0) == 0)
                    us[name.substr(2)] = entry.path().string();
            }
        }
        for (const auto& [key, path] : phis) {
            Snapshot phi = read_snapshot(path);
            a.check("snapshot is scalar", !phi.is_vector, path);
            if (phi.is_vector) continue;
            auto mate = us.find(key);
            if (mate != us.end()) {
                Snapshot u = read_snapshot(mate->second);
                a.check("snapshot is vector", u.is_vector, mate->second);
                if (u.is_vector) a.state(path, phi.scalar, &u.vector);
            } else {
                a.state(path, phi.scalar, nullptr);
            }
        }

        if (fs::exists(dir + "/final.ckpt")) {
            const SimState s = read_checkpoint(dir + "/final", hash);
            a.state(dir + "/final (checkpoint)", s.phi, &s.u);
        }
    }

    std::cout << "verdict: " << (a.all_pass ? "PASS" : "FAIL") << "\n";
    return a.all_pass ? 0 : 3;
}

}  // namespace nlcli
