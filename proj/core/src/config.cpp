#include "nlchns/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "nlchns/chem.hpp"
#include "nlchns/snapshot.hpp"

namespace nlchns {

namespace {

constexpr double pi = std::numbers::pi;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_key(const std::string& key, const std::string& what) {
    throw ConfigError("config key '" + key + "': " + what);
}

double num(const std::string& key, const std::string& v) {
    try {
        return parse_double(v);
    } catch (const FormatError&) {
        bad_key(key, "malformed number '" + v + "'");
    }
}

int integer(const std::string& key, const std::string& v) {
    int out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size())
        bad_key(key, "malformed integer '" + v + "'");
    return out;
}

std::uint64_t uinteger(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size())
        bad_key(key, "malformed unsigned integer '" + v + "'");
    return out;
}

template <class E>
E enum_of(const std::string& key, const std::string& v,
          const std::map<std::string, E>& names) {
    const auto it = names.find(v);
    if (it == names.end()) {
        std::string valid;
        for (const auto& [n, e] : names) {
            if (!valid.empty()) valid += ", ";
            valid += n;
        }
        bad_key(key, "unknown value '" + v + "' (valid: " + valid + ")");
    }
    return it->second;
}

template <class E>
std::string name_of(E e, const std::map<std::string, E>& names) {
    for (const auto& [n, v] : names)
        if (v == e) return n;
    return "?";
}

const std::map<std::string, BoundaryMode> kBc = {
    {"periodic", BoundaryMode::Periodic}, {"box", BoundaryMode::Box}};
const std::map<std::string, KernelFamily> kKernel = {
    {"gaussian", KernelFamily::Gaussian},
    {"tophat", KernelFamily::TopHat},
    {"newtonian", KernelFamily::Newtonian},
    {"bessel", KernelFamily::Bessel}};
const std::map<std::string, PotentialKind> kPotential = {
    {"doublewell", PotentialKind::DoubleWell},
    {"polynomial", PotentialKind::Polynomial},
    {"log", PotentialKind::Logarithmic},
    {"splitsingular", PotentialKind::SplitSingular}};
const std::map<std::string, MobilityKind> kMobility = {
    {"const", MobilityKind::Constant}, {"degenerate", MobilityKind::Degenerate}};
const std::map<std::string, ViscosityKind> kViscosity = {
    {"const", ViscosityKind::Constant}, {"tanh", ViscosityKind::TanhBlend}};
const std::map<std::string, ForcingKind> kForcing = {
    {"zero", ForcingKind::Zero},
    {"const", ForcingKind::ConstantVector},
    {"fourier", ForcingKind::FourierBody}};
const std::map<std::string, VelocityInit> kUInit = {
    {"zero", VelocityInit::Zero},
    {"taylorgreen", VelocityInit::TaylorGreen},
    {"random", VelocityInit::RandomSolenoidal}};
const std::map<std::string, PhaseInit> kPhiInit = {
    {"const", PhaseInit::Constant},
    {"cosinemix", PhaseInit::CosineMix},
    {"random", PhaseInit::RandomSmooth}};
const std::map<std::string, KortewegForm> kKorteweg = {
    {"mugradphi", KortewegForm::MuGradPhi},
    {"bounded", KortewegForm::BoundedCoefficients}};

std::vector<double> coeff_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::string item;
    std::istringstream in(v);
    while (std::getline(in, item, ',')) out.push_back(num(key, trim(item)));
    if (out.empty()) bad_key(key, "empty coefficient list");
    return out;
}

std::string coeff_text(const std::vector<double>& c) {
    std::string out;
    for (std::size_t k = 0; k < c.size(); ++k) {
        if (k) out += ',';
        out += format_double(c[k]);
    }
    return out;
}

}  // namespace

// ---- sub-spec validation ---------------------------------------------------------

void ForcingSpec::validate() const {
    if (!std::isfinite(fx) || !std::isfinite(fy) || !std::isfinite(amp))
        throw ConfigError("forcing parameters must be finite");
    if (kind == ForcingKind::FourierBody && amp != 0.0 && kx == 0 && ky == 0)
        throw ConfigError("fourier forcing needs a nonzero wavenumber");
}

void InitSpec::validate() const {
    if (u_amp < 0.0 || phi_amp < 0.0)
        throw ConfigError("initial amplitudes must be nonnegative");
    if (u_kmax < 1 || phi_kmax < 1)
        throw ConfigError("initial band limits must be >= 1");
    if (phi_bound <= 0.0) throw ConfigError("init.phi_bound must be positive");
}

void SchemeSpec::validate() const {
    if (dt <= 0.0) throw ConfigError("time.dt must be positive");
    if (t_end < 0.0) throw ConfigError("time.t_end must be nonnegative");
    if (dt_min <= 0.0 || dt_min > dt)
        throw ConfigError("time.dt_min must lie in (0, dt]");
    if (cfl <= 0.0 || cfl > 2.0) throw ConfigError("time.cfl must lie in (0, 2]");
    if (max_retries < 1) throw ConfigError("time.max_retries must be >= 1");
    if (tol <= 0.0 || newton_tol <= 0.0)
        throw ConfigError("solver tolerances must be positive");
    if (max_iter < 1 || newton_max_iter < 1)
        throw ConfigError("solver iteration caps must be >= 1");
}

void OutputSpec::validate() const {
    if (sample_dt < 0.0) throw ConfigError("output.sample_dt must be >= 0");
    if (snapshot_count < 0) throw ConfigError("output.snapshots must be >= 0");
}

void SimConfig::validate() const {
    grid.validate();
    kernel.validate();
    potential.validate();
    mobility.validate();
    viscosity.validate();
    forcing.validate();
    init.validate();
    scheme.validate();
    output.validate();
    if (!(c0 > 0.0)) throw ConfigError("c0 must be positive");
    if (mobility.degenerate() && potential.kind != PotentialKind::SplitSingular)
        throw ConfigError(
            "degenerate mobility requires the split singular potential "
            "(mobility.family=degenerate pairs only with "
            "potential.family=splitsingular)");
    if (potential.singular()) {
        if (init.phi_bound >= 1.0)
            throw ConfigError(
                "singular potential requires init.phi_bound < 1");
        if (std::abs(init.phi_mean) > init.phi_bound)
            throw ConfigError(
                "singular potential requires |mean(phi0)| = " +
                format_double(std::abs(init.phi_mean)) +
                " <= init.phi_bound < 1");
    }
}

// ---- parsing ---------------------------------------------------------------------

SimConfig parse_config(const std::string& text) {
    SimConfig c;
    // grid fields are collected first and validated at the end, since the
    // Grid constructor enforces invariants eagerly
    int nx = c.grid.nx, ny = c.grid.ny;
    double lx = c.grid.lx, ly = c.grid.ly;
    BoundaryMode bc = c.grid.bc;

    using Setter = std::function<void(const std::string&, const std::string&)>;
    const std::map<std::string, Setter> set = {
        {"grid.nx", [&](auto& k, auto& v) { nx = integer(k, v); }},
        {"grid.ny", [&](auto& k, auto& v) { ny = integer(k, v); }},
        {"grid.lx", [&](auto& k, auto& v) { lx = num(k, v); }},
        {"grid.ly", [&](auto& k, auto& v) { ly = num(k, v); }},
        {"grid.bc", [&](auto& k, auto& v) { bc = enum_of(k, v, kBc); }},
        {"kernel.family",
         [&](auto& k, auto& v) { c.kernel.family = enum_of(k, v, kKernel); }},
        {"kernel.eps", [&](auto& k, auto& v) { c.kernel.eps = num(k, v); }},
        {"kernel.delta", [&](auto& k, auto& v) { c.kernel.delta = num(k, v); }},
        {"kernel.amp", [&](auto& k, auto& v) { c.kernel.amp = num(k, v); }},
        {"kernel.kappa", [&](auto& k, auto& v) { c.kernel.kappa = num(k, v); }},
        {"kernel.rho0", [&](auto& k, auto& v) { c.kernel.rho0 = num(k, v); }},
        {"kernel.scale", [&](auto& k, auto& v) { c.kernel.scale = num(k, v); }},
        {"potential.family",
         [&](auto& k, auto& v) {
             c.potential.kind = enum_of(k, v, kPotential);
         }},
        {"potential.theta",
         [&](auto& k, auto& v) { c.potential.theta = num(k, v); }},
        {"potential.thetac",
         [&](auto& k, auto& v) { c.potential.theta_c = num(k, v); }},
        {"potential.coeffs",
         [&](auto& k, auto& v) { c.potential.coeffs = coeff_list(k, v); }},
        {"mobility.family",
         [&](auto& k, auto& v) { c.mobility.kind = enum_of(k, v, kMobility); }},
        {"mobility.m0", [&](auto& k, auto& v) { c.mobility.m0 = num(k, v); }},
        {"mobility.k1", [&](auto& k, auto& v) { c.mobility.k1 = num(k, v); }},
        {"viscosity.family",
         [&](auto& k, auto& v) {
             c.viscosity.kind = enum_of(k, v, kViscosity);
         }},
        {"viscosity.nu", [&](auto& k, auto& v) { c.viscosity.nu = num(k, v); }},
        {"viscosity.nu1",
         [&](auto& k, auto& v) { c.viscosity.nu1 = num(k, v); }},
        {"viscosity.nu2",
         [&](auto& k, auto& v) { c.viscosity.nu2 = num(k, v); }},
        {"forcing.family",
         [&](auto& k, auto& v) { c.forcing.kind = enum_of(k, v, kForcing); }},
        {"forcing.fx", [&](auto& k, auto& v) { c.forcing.fx = num(k, v); }},
        {"forcing.fy", [&](auto& k, auto& v) { c.forcing.fy = num(k, v); }},
        {"forcing.kx", [&](auto& k, auto& v) { c.forcing.kx = integer(k, v); }},
        {"forcing.ky", [&](auto& k, auto& v) { c.forcing.ky = integer(k, v); }},
        {"forcing.amp", [&](auto& k, auto& v) { c.forcing.amp = num(k, v); }},
        {"init.u",
         [&](auto& k, auto& v) { c.init.u_kind = enum_of(k, v, kUInit); }},
        {"init.u_amp", [&](auto& k, auto& v) { c.init.u_amp = num(k, v); }},
        {"init.u_kmax",
         [&](auto& k, auto& v) { c.init.u_kmax = integer(k, v); }},
        {"init.phi",
         [&](auto& k, auto& v) { c.init.phi_kind = enum_of(k, v, kPhiInit); }},
        {"init.phi_mean",
         [&](auto& k, auto& v) { c.init.phi_mean = num(k, v); }},
        {"init.phi_amp",
         [&](auto& k, auto& v) { c.init.phi_amp = num(k, v); }},
        {"init.phi_bound",
         [&](auto& k, auto& v) { c.init.phi_bound = num(k, v); }},
        {"init.phi_kmax",
         [&](auto& k, auto& v) { c.init.phi_kmax = integer(k, v); }},
        {"time.dt", [&](auto& k, auto& v) { c.scheme.dt = num(k, v); }},
        {"time.t_end", [&](auto& k, auto& v) { c.scheme.t_end = num(k, v); }},
        {"time.dt_min",
         [&](auto& k, auto& v) { c.scheme.dt_min = num(k, v); }},
        {"time.cfl", [&](auto& k, auto& v) { c.scheme.cfl = num(k, v); }},
        {"time.stabilization",
         [&](auto& k, auto& v) { c.scheme.stabilization = num(k, v); }},
        {"time.max_retries",
         [&](auto& k, auto& v) { c.scheme.max_retries = integer(k, v); }},
        {"time.korteweg",
         [&](auto& k, auto& v) { c.scheme.korteweg = enum_of(k, v, kKorteweg); }},
        {"solver.tol", [&](auto& k, auto& v) { c.scheme.tol = num(k, v); }},
        {"solver.max_iter",
         [&](auto& k, auto& v) { c.scheme.max_iter = integer(k, v); }},
        {"solver.newton_tol",
         [&](auto& k, auto& v) { c.scheme.newton_tol = num(k, v); }},
        {"solver.newton_max_iter",
         [&](auto& k, auto& v) { c.scheme.newton_max_iter = integer(k, v); }},
        {"output.sample_dt",
         [&](auto& k, auto& v) { c.output.sample_dt = num(k, v); }},
        {"output.snapshots",
         [&](auto& k, auto& v) { c.output.snapshot_count = integer(k, v); }},
        {"seed", [&](auto& k, auto& v) { c.seed = uinteger(k, v); }},
        {"c0", [&](auto& k, auto& v) { c.c0 = num(k, v); }},
    };

    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected key=value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        const auto it = set.find(key);
        if (it == set.end())
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": unknown key '" + key + "'");
        it->second(key, val);
    }

    try {
        c.grid = Grid(nx, ny, lx, ly, bc);
    } catch (const Error& e) {
        throw ConfigError(std::string("grid: ") + e.what());
    }
    c.validate();
    return c;
}

SimConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

// ---- canonical serialization -------------------------------------------------------

std::string serialize_config(const SimConfig& c) {
    std::string o;
    auto put = [&](const std::string& k, const std::string& v) {
        o += k;
        o += '=';
        o += v;
        o += '\n';
    };
    auto putd = [&](const std::string& k, double v) { put(k, format_double(v)); };
    auto puti = [&](const std::string& k, long long v) {
        put(k, std::to_string(v));
    };
    puti("grid.nx", c.grid.nx);
    puti("grid.ny", c.grid.ny);
    putd("grid.lx", c.grid.lx);
    putd("grid.ly", c.grid.ly);
    put("grid.bc", name_of(c.grid.bc, kBc));
    put("kernel.family", name_of(c.kernel.family, kKernel));
    putd("kernel.eps", c.kernel.eps);
    putd("kernel.delta", c.kernel.delta);
    putd("kernel.amp", c.kernel.amp);
    putd("kernel.kappa", c.kernel.kappa);
    putd("kernel.rho0", c.kernel.rho0);
    putd("kernel.scale", c.kernel.scale);
    put("potential.family", name_of(c.potential.kind, kPotential));
    putd("potential.theta", c.potential.theta);
    putd("potential.thetac", c.potential.theta_c);
    if (!c.potential.coeffs.empty())
        put("potential.coeffs", coeff_text(c.potential.coeffs));
    put("mobility.family", name_of(c.mobility.kind, kMobility));
    putd("mobility.m0", c.mobility.m0);
    putd("mobility.k1", c.mobility.k1);
    put("viscosity.family", name_of(c.viscosity.kind, kViscosity));
    putd("viscosity.nu", c.viscosity.nu);
    putd("viscosity.nu1", c.viscosity.nu1);
    putd("viscosity.nu2", c.viscosity.nu2);
    put("forcing.family", name_of(c.forcing.kind, kForcing));
    putd("forcing.fx", c.forcing.fx);
    putd("forcing.fy", c.forcing.fy);
    puti("forcing.kx", c.forcing.kx);
    puti("forcing.ky", c.forcing.ky);
    putd("forcing.amp", c.forcing.amp);
    put("init.u", name_of(c.init.u_kind, kUInit));
    putd("init.u_amp", c.init.u_amp);
    puti("init.u_kmax", c.init.u_kmax);
    put("init.phi", name_of(c.init.phi_kind, kPhiInit));
    putd("init.phi_mean", c.init.phi_mean);
    putd("init.phi_amp", c.init.phi_amp);
    putd("init.phi_bound", c.init.phi_bound);
    puti("init.phi_kmax", c.init.phi_kmax);
    putd("time.dt", c.scheme.dt);
    putd("time.t_end", c.scheme.t_end);
    putd("time.dt_min", c.scheme.dt_min);
    putd("time.cfl", c.scheme.cfl);
    putd("time.stabilization", c.scheme.stabilization);
    puti("time.max_retries", c.scheme.max_retries);
    put("time.korteweg", name_of(c.scheme.korteweg, kKorteweg));
    putd("solver.tol", c.scheme.tol);
    puti("solver.max_iter", c.scheme.max_iter);
    putd("solver.newton_tol", c.scheme.newton_tol);
    puti("solver.newton_max_iter", c.scheme.newton_max_iter);
    putd("output.sample_dt", c.output.sample_dt);
    puti("output.snapshots", c.output.snapshot_count);
    put("seed", std::to_string(c.seed));
    putd("c0", c.c0);
    return o;
}

std::string config_hash(const SimConfig& c) {
    const std::string text = serialize_config(c);
    std::uint64_t h = 14695981039346656037ull;
    for (const unsigned char byte : text) {
        h ^= byte;
        h *= 1099511628211ull;
    }
    static const char* hex = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = hex[h & 0xf];
        h >>= 4;
    }
    return out;
}

// ---- body force ---------------------------------------------------------------------

VectorField body_force(const Grid& g, const ForcingSpec& f) {
    VectorField h(g);
    switch (f.kind) {
        case ForcingKind::Zero:
            break;
        case ForcingKind::ConstantVector:
            h.fill(0.0);
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i <= g.nx; ++i) h.ux(i, j) = f.fx;
            for (int j = 0; j <= g.ny; ++j)
                for (int i = 0; i < g.nx; ++i) h.uy(i, j) = f.fy;
            break;
        case ForcingKind::FourierBody: {
            auto phase = [&](double x, double y) {
                return 2.0 * pi * (f.kx * x / g.lx + f.ky * y / g.ly);
            };
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i <= g.nx; ++i)
                    h.ux(i, j) = f.amp * std::sin(phase(g.xf(i), g.yc(j)));
            for (int j = 0; j <= g.ny; ++j)
                for (int i = 0; i < g.nx; ++i)
                    h.uy(i, j) = f.amp * std::cos(phase(g.xc(i), g.yf(j)));
            break;
        }
    }
    h.enforce_bc();
    return h;
}

// ---- assumption audit ----------------------------------------------------------------

namespace {

/// Largest endpoint band width e such that F1''(+-(1-e)) >= kappa, using the
/// endpoint monotonicity of the convex part.  Returns 0 if the threshold is
/// never reached.
double endpoint_band(const PotentialSpec& pot, double kappa) {
    auto ok = [&](double e) {
        return pot.d2f1(1.0 - e) >= kappa && pot.d2f1(-1.0 + e) >= kappa;
    };
    if (!ok(1e-12)) return 0.0;
    double lo = 1e-12, hi = 1.0;
    if (ok(1.0 - 1e-12)) return 1.0;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (ok(mid) ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace

AssumptionReport audit_assumptions(const SimConfig& cfg,
                                   const ConvolutionPlan& plan) {
    AssumptionReport r;
    r.a_min = plan.a_min();
    r.a_max = plan.a_max();
    r.a_star = plan.a_star();
    r.grad_j_l1 = cfg.kernel.differentiable() ? plan.grad_l1() : 0.0;
    r.c0 = cfg.c0;
    r.d2f_min = cfg.potential.d2f_lower_bound();
    r.coercivity = r.d2f_min + r.a_min;
    r.nu_min = cfg.viscosity.nu_min();
    r.nu_max = cfg.viscosity.nu_max();

    // explicit-split shift used by the regular-potential scheme: the step
    // energy estimate needs S >= (sup F'' + a*)/2 over the visited range
    if (!cfg.potential.singular()) {
        if (cfg.scheme.stabilization >= 0.0) {
            r.stabilization = cfg.scheme.stabilization;
        } else {
            const double range = 1.5;
            double sup = 0.0;
            for (int k = 0; k <= 3000; ++k) {
                const double s = -range + 2.0 * range * k / 3000.0;
                sup = std::max(sup, cfg.potential.d2f(s));
            }
            r.stabilization = 0.5 * (sup + r.a_star);
        }
    }

    if (cfg.degenerate()) {
        double b = cfg.potential.d2f2(-1.0);
        for (int k = 0; k <= 2000; ++k)
            b = std::min(b, cfg.potential.d2f2(-1.0 + 2.0 * k / 2000.0));
        r.b_star = b;
        r.kappa_required = 4.0 * (r.a_star - r.a_min - r.b_star);
        r.eps0 = endpoint_band(cfg.potential, r.kappa_required);
        r.alpha0 = alpha0(cfg.potential, cfg.mobility);
        double rho = 0.0;
        for (int k = 1; k < 4000; ++k) {
            const double s = -1.0 + 2.0 * k / 4000.0;
            const double f1pp = cfg.potential.d2f1(s);
            const double need = -(cfg.potential.d2f2(s) + r.a_min);
            if (need > 0.0 && f1pp > 0.0)
                rho = std::max(rho, need / f1pp);
        }
        r.rho = rho;
    }

    if (r.coercivity < r.c0) {
        r.failure = "coercivity: min(F'' + a) = " +
                    format_double(r.coercivity) +
                    " < c0 = " + format_double(r.c0);
    } else if (cfg.degenerate() && r.rho >= 1.0) {
        r.failure =
            "convexity interpolation: smallest rho with rho F1'' + F2'' + a "
            ">= 0 is " +
            format_double(r.rho) + " >= 1";
    } else if (cfg.degenerate() && !(r.alpha0 > 0.0)) {
        r.failure = "product lower bound: min m F1'' = " +
                    format_double(r.alpha0) + " is not positive";
    } else if (cfg.degenerate() && !(r.eps0 > 0.0)) {
        r.failure =
            "stability margin: F1'' never reaches the required threshold " +
            format_double(r.kappa_required) + " near the endpoints";
    }
    r.ok = r.failure.empty();
    return r;
}

}  // namespace nlchns
