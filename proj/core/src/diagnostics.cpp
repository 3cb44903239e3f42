#include "nlchns/diagnostics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "nlchns/ops.hpp"
#include "nlchns/snapshot.hpp"

namespace nlchns {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Least-squares slope of y against x.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

// ---- trajectory records ------------------------------------------------------

void TrajectoryLog::add(const TrajectorySample& s) {
    if (!samples_.empty() && s.t <= samples_.back().t)
        throw NonuniformSampling("trajectory sample times must increase: " +
                                 std::to_string(s.t) + " after " +
                                 std::to_string(samples_.back().t));
    samples_.push_back(s);
}

void TrajectoryLog::add_snapshot(double t, const ScalarField& phi) {
    if (!snap_t_.empty() && t <= snap_t_.back())
        throw NonuniformSampling("snapshot times must increase");
    if (!snaps_.empty() && snaps_.front().grid() != phi.grid())
        throw GridMismatch("snapshot grid changed mid-log");
    snap_t_.push_back(t);
    snaps_.push_back(phi);
}

double TrajectoryLog::duration() const {
    return samples_.size() < 2 ? 0.0
                               : samples_.back().t - samples_.front().t;
}

TrajectorySample measure(const Simulator& sim, const SimState& s) {
    TrajectorySample out;
    out.t = s.t;
    out.energy = sim.energy(s);
    out.mass = mean(s.phi);
    out.max_phi = max_abs(s.phi);
    out.u_norms = norms(s.u);
    out.phi_norms = norms(s.phi);
    out.grad_mu_norms = norms(gradient(sim.mu_of(s.phi)));
    out.grad_phi_norms = norms(gradient(s.phi));
    return out;
}

// ---- CSV surface -------------------------------------------------------------

std::vector<CsvRow> trajectory_rows(const TrajectoryLog& log) {
    const auto& ss = log.samples();
    std::vector<CsvRow> rows(ss.size());
    for (std::size_t n = 0; n < ss.size(); ++n) {
        const TrajectorySample& s = ss[n];
        CsvRow& r = rows[n];
        r.t = s.t;
        r.e_total = s.energy.total;
        r.e_kin = s.energy.kinetic;
        r.e_int = s.energy.interaction;
        r.e_bulk = s.energy.bulk;
        r.mass = s.mass;
        r.maxphi = s.max_phi;
        r.diss_visc = s.energy.diss_visc;
        r.diss_chem = s.energy.diss_chem;
        r.work = s.energy.work_rate;
        if (n + 1 < ss.size()) {
            const TrajectorySample& q = ss[n + 1];
            const double dt = q.t - s.t;
            r.residual =
                (q.energy.total - s.energy.total) / dt +
                0.5 * (s.energy.diss_visc + q.energy.diss_visc) +
                0.5 * (s.energy.diss_chem + q.energy.diss_chem) -
                0.5 * (s.energy.work_rate + q.energy.work_rate);
        }
    }
    return rows;
}

void write_csv(const std::string& path, const std::vector<CsvRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << kCsvHeader << '\n';
    for (const CsvRow& r : rows) {
        const std::array<double, 11> v{r.t,       r.e_total,   r.e_kin,
                                       r.e_int,   r.e_bulk,    r.mass,
                                       r.maxphi,  r.diss_visc, r.diss_chem,
                                       r.work,    r.residual};
        for (int k = 0; k < 11; ++k)
            out << (k ? "," : "") << format_double(v[k]);
        out << '\n';
    }
    if (!out.flush()) throw IoError("write failed: " + path);
}

std::vector<CsvRow> read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    const std::string header(kCsvHeader);
    if (text.substr(0, header.size()) != header)
        throw FormatError("CSV header mismatch", 0);
    std::size_t pos = header.size();
    if (pos >= text.size() || text[pos] != '\n')
        throw FormatError("expected newline after CSV header", pos);
    ++pos;

    std::vector<CsvRow> rows;
    while (pos < text.size()) {
        const std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos)
            throw FormatError("CSV row missing trailing newline", text.size());
        std::array<double, 11> v{};
        std::size_t field_start = pos;
        for (int k = 0; k < 11; ++k) {
            const std::size_t limit = (k == 10) ? eol : text.find(',', field_start);
            if (limit == std::string::npos || limit > eol)
                throw FormatError("CSV row has too few fields", eol);
            try {
                v[k] = parse_double(text.substr(field_start, limit - field_start));
            } catch (const FormatError& e) {
                throw FormatError("bad CSV number",
                                  field_start + e.byte_offset);
            }
            field_start = limit + 1;
        }
        if (field_start != eol + 1)
            throw FormatError("CSV row has too many fields", field_start - 1);
        rows.push_back(CsvRow{v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7],
                              v[8], v[9], v[10]});
        pos = eol + 1;
    }
    return rows;
}

// ---- energy identity ---------------------------------------------------------

ResidualSeries energy_identity_residual(const TrajectoryLog& log) {
    const auto& ss = log.samples();
    if (ss.size() < 2)
        throw TrajectoryTooShort("energy balance needs at least two samples");
    const double dt0 = ss[1].t - ss[0].t;
    for (std::size_t n = 1; n + 1 < ss.size(); ++n) {
        const double dt = ss[n + 1].t - ss[n].t;
        if (std::abs(dt - dt0) > 1e-9 * std::max(1.0, std::abs(dt0)))
            throw NonuniformSampling(
                "energy balance needs uniform sampling: spacing " +
                std::to_string(dt) + " vs " + std::to_string(dt0));
    }
    ResidualSeries out;
    out.r.reserve(ss.size() - 1);
    for (std::size_t n = 0; n + 1 < ss.size(); ++n) {
        const TrajectorySample& s = ss[n];
        const TrajectorySample& q = ss[n + 1];
        out.r.push_back((q.energy.total - s.energy.total) / dt0 +
                        0.5 * (s.energy.diss_visc + q.energy.diss_visc) +
                        0.5 * (s.energy.diss_chem + q.energy.diss_chem) -
                        0.5 * (s.energy.work_rate + q.energy.work_rate));
        out.avg_abs += std::abs(out.r.back());
    }
    out.avg_abs /= static_cast<double>(out.r.size());
    return out;
}

// ---- dissipative envelope ----------------------------------------------------

DissipativeFit dissipative_check(const TrajectoryLog& log,
                                 double floor_level) {
    const auto& ss = log.samples();
    if (log.duration() < 50.0)
        throw TrajectoryTooShort("dissipative fit needs a span of at least 50, got " +
                                 std::to_string(log.duration()));

    const double t0 = ss.front().t;
    const double e0 = ss.front().energy.total;
    const double span = log.duration();

    DissipativeFit fit;
    // smallest plateau excess: measured over the final fifth
    double tail = 0.0;
    for (const TrajectorySample& s : ss)
        if (s.t >= t0 + 0.8 * span)
            tail = std::max(tail, s.energy.total - floor_level);
    fit.K_fit = std::max(0.0, tail);

    // largest rate on a geometric grid for which the envelope holds
    const double slack =
        1e-12 * (1.0 + std::abs(e0) + std::abs(floor_level));
    auto envelope_holds = [&](double k) {
        for (const TrajectorySample& s : ss) {
            const double bound =
                e0 * std::exp(-k * (s.t - t0)) + floor_level + fit.K_fit;
            if (s.energy.total > bound + slack) return false;
        }
        return true;
    };
    fit.k_fit = 0.0;
    for (int j = 0; j <= 60; ++j) {
        const double k = 256.0 * std::pow(2.0, -j);
        if (envelope_holds(k)) {
            fit.k_fit = k;
            break;
        }
    }
    fit.ok = fit.k_fit > 0.0 && std::isfinite(fit.K_fit);
    return fit;
}

// ---- two-state separation ----------------------------------------------------

ContractionMetrics contraction_metrics(const SimState& a, const SimState& b,
                                       const Simulator& sim) {
    const Grid& g = sim.config().grid;
    if (a.phi.grid() != g || b.phi.grid() != g || a.u.grid() != g ||
        b.u.grid() != g)
        throw GridMismatch("contraction metrics: states on a different grid");

    VectorField du = a.u;
    du -= b.u;
    ScalarField dphi = a.phi;
    dphi -= b.phi;

    const double du2 = dot(du, du);
    const double dual = sim.poisson().vdual_norm(dphi);

    ContractionMetrics m;
    m.d_weak = du2 + dual * dual;
    m.d_strong = du2 + dot(dphi, dphi);
    m.mean_gap = std::abs(mean(dphi));

    const double gj = sim.config().kernel.differentiable()
                          ? sim.plan().grad_l1()
                          : 0.0;
    const NormSuite na = norms(a.phi);
    const NormSuite nb = norms(b.phi);
    const NormSuite nu = norms(b.u);
    const double alpha = std::pow(gj, 4) * (std::pow(na.l4, 4) +
                                            std::pow(nb.l4, 4)) +
                         nu.h1_semi * nu.h1_semi;
    m.beta_integrand =
        alpha + 1.0 + na.l4 * na.l4 + std::pow(nu.l4, 4);
    return m;
}

// ---- empirical modulus of continuity ------------------------------------------

HolderFit holder_modulus(const TrajectoryLog& log) {
    const auto& snaps = log.snapshots();
    const auto& times = log.snapshot_times();
    if (snaps.size() < 3)
        throw InsufficientSnapshots("modulus fit needs at least 3 snapshots, got " +
                                    std::to_string(snaps.size()));
    const Grid& g = snaps.front().grid();

    // spatial: per-snapshot slope of log max|phi(x+r) - phi(x)| vs log r,
    // axis-aligned offsets of 1, 2, 4, 8 cells
    auto spatial_slope = [&](const ScalarField& f) {
        std::vector<double> lx, ly;
        for (int c : {1, 2, 4, 8}) {
            if (c >= g.nx || c >= g.ny) break;
            double mx = 0.0;
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i) {
                    if (g.periodic() || i + c < g.nx)
                        mx = std::max(mx, std::abs(f.wrap(i + c, j) - f(i, j)));
                    if (g.periodic() || j + c < g.ny)
                        mx = std::max(mx, std::abs(f.wrap(i, j + c) - f(i, j)));
                }
            if (mx > 1e-14) {
                lx.push_back(std::log(c * g.hx()));
                ly.push_back(std::log(mx));
            }
        }
        if (lx.size() < 2) return kInf;  // constant field
        return ls_slope(lx, ly);
    };
    double ax_sum = 0.0;
    int ax_n = 0;
    for (const ScalarField& f : snaps) {
        const double s = spatial_slope(f);
        if (std::isfinite(s)) {
            ax_sum += s;
            ++ax_n;
        }
    }

    // temporal: all snapshot pairs contribute (log gap, log max difference)
    std::vector<double> lt, ld;
    for (std::size_t i = 0; i < snaps.size(); ++i)
        for (std::size_t j = i + 1; j < snaps.size(); ++j) {
            ScalarField d = snaps[j];
            d -= snaps[i];
            const double m = max_abs(d);
            if (m > 1e-14) {
                lt.push_back(std::log(times[j] - times[i]));
                ld.push_back(std::log(m));
            }
        }

    HolderFit fit;
    fit.alpha_x = ax_n ? ax_sum / ax_n : kInf;
    fit.alpha_t = lt.size() >= 2 ? ls_slope(lt, ld) : kInf;
    return fit;
}

}  // namespace nlchns
