#pragma once
/// Shared plumbing for the nlchns command-line tool: subcommand option
/// structs and entry points, the run manifest, and small file helpers.
///
/// Exit-code contract (mapped centrally in main.cpp):
///   0 ok | 2 config error | 4 I/O or format error | 3 numerical failure.

#include <string>
#include <vector>

#include "nlchns/config.hpp"

namespace nlcli {

inline constexpr const char* kVersion = "0.1.0";

/// NLCHNS_THREADS environment value (0 when unset or unparsable).  The
/// solver is serial; the requested value is recorded in the manifest and a
/// value of 0 or 1 is honored exactly.
int threads_requested();

/// Manifest JSON text: config hash, version, seed, regime, the derived
/// assumption constants, thread settings, and a UTC creation timestamp.
std::string manifest_json(const nlchns::SimConfig& cfg,
                          const nlchns::AssumptionReport& audit);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

// ---- subcommands -----------------------------------------------------------

struct RunOptions {
    std::string config_path;
    std::string out_dir;
    std::string restart_prefix;  ///< empty = fresh start from the config seed
};
int cmd_run(const RunOptions& opt);

struct TwinOptions {
    std::string config_path;
    std::string out_path = "-";  ///< "-" = stdout
    std::string mode = "phase-meanzero";
    double eps = 1e-6;
    double horizon = 1.0;
    int stride = 10;
    std::vector<double> collapse;  ///< extra magnitudes for the collapse audit
};
int cmd_twin(const TwinOptions& opt);

struct AuditOptions {
    std::string config_path;
    std::string dir;                ///< audit a whole run directory
    std::string phi_path;           ///< audit a single phase snapshot
    std::string u_path;             ///< optional velocity snapshot beside it
    std::string checkpoint_prefix;  ///< audit a checkpoint
};
int cmd_audit(const AuditOptions& opt);

struct OpscheckOptions {
    bool inject_fault = false;  ///< test fixture: corrupt one input
};
int cmd_opscheck(const OpscheckOptions& opt);

struct LongtimeOptions {
    std::string config_path;
    std::string out_path = "-";
    std::string csv_path;  ///< optional trajectory CSV
    double sample_dt = 0.5;
};
int cmd_longtime(const LongtimeOptions& opt);

struct RefineOptions {
    std::string config_path;
    std::string out_path = "-";
    std::string axis = "spatial";
    int levels = 3;
    int reference_extra = 1;
    double t_end = 0.1;
    double min_order = 0.0;  ///< gate: every observed order must reach this
};
int cmd_refine(const RefineOptions& opt);

}  // namespace nlcli
