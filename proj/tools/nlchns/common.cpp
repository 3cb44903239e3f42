#include "common.hpp"

#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "nlchns/errors.hpp"

namespace nlcli {

using nlohmann::json;

int threads_requested() {
    const char* v = std::getenv("NLCHNS_THREADS");
    if (!v || !*v) return 0;
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (end == v || *end != '\0' || n < 0) return 0;
    return static_cast<int>(n);
}

namespace {

std::string utc_now() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

const char* potential_name(nlchns::PotentialKind k) {
    switch (k) {
        case nlchns::PotentialKind::DoubleWell: return "doublewell";
        case nlchns::PotentialKind::Polynomial: return "polynomial";
        case nlchns::PotentialKind::Logarithmic: return "logarithmic";
        case nlchns::PotentialKind::SplitSingular: return "splitsingular";
    }
    return "?";
}

}  // namespace

std::string manifest_json(const nlchns::SimConfig& cfg,
                          const nlchns::AssumptionReport& a) {
    json doc;
    doc["version"] = kVersion;
    doc["config_hash"] = nlchns::config_hash(cfg);
    doc["seed"] = cfg.seed;
    doc["created_utc"] = utc_now();
    doc["threads_requested"] = threads_requested();
    doc["threads_effective"] = 1;  // the solver is serial
    doc["regime"] = {
        {"potential", potential_name(cfg.potential.kind)},
        {"mobility", cfg.degenerate() ? "degenerate" : "constant"},
        {"viscosity", cfg.variable_viscosity() ? "variable" : "constant"},
    };
    doc["assumptions"] = {
        {"ok", a.ok},
        {"failure", a.failure},
        {"a_min", a.a_min},
        {"a_max", a.a_max},
        {"a_star", a.a_star},
        {"grad_j_l1", a.grad_j_l1},
        {"d2f_min", a.d2f_min},
        {"coercivity", a.coercivity},
        {"c0_required", a.c0},
        {"b_star", a.b_star},
        {"kappa_required", a.kappa_required},
        {"eps0", a.eps0},
        {"rho", a.rho},
        {"alpha0", a.alpha0},
        {"nu_min", a.nu_min},
        {"nu_max", a.nu_max},
        {"stabilization", a.stabilization},
    };
    return doc.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw nlchns::IoError("cannot open for writing: " + path);
    out << text;
    if (!out.flush()) throw nlchns::IoError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw nlchns::IoError("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace nlcli
