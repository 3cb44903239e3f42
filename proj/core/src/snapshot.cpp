#include "nlchns/snapshot.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "nlchns/errors.hpp"

namespace nlchns {

namespace {

constexpr const char* kMagic = "NLCHNS1";

void write_doubles_le(std::ofstream& out, const double* p, std::size_t n) {
    if constexpr (std::endian::native == std::endian::little) {
        out.write(reinterpret_cast<const char*>(p),
                  static_cast<std::streamsize>(n * sizeof(double)));
    } else {
        std::vector<std::uint64_t> tmp(n);
        std::memcpy(tmp.data(), p, n * sizeof(double));
        for (auto& w : tmp) w = __builtin_bswap64(w);
        out.write(reinterpret_cast<const char*>(tmp.data()),
                  static_cast<std::streamsize>(n * sizeof(double)));
    }
}

void read_doubles_le(std::ifstream& in, double* p, std::size_t n,
                     std::size_t header_bytes) {
    in.read(reinterpret_cast<char*>(p),
            static_cast<std::streamsize>(n * sizeof(double)));
    if (static_cast<std::size_t>(in.gcount()) != n * sizeof(double))
        throw FormatError("snapshot payload truncated",
                          header_bytes + static_cast<std::size_t>(in.gcount()));
    if constexpr (std::endian::native == std::endian::big) {
        auto* w = reinterpret_cast<std::uint64_t*>(p);
        for (std::size_t k = 0; k < n; ++k) w[k] = __builtin_bswap64(w[k]);
    }
}

std::string header_line(bool vector, const Grid& g) {
    std::ostringstream os;
    os << kMagic << " kind=" << (vector ? "vector" : "scalar")
       << " nx=" << g.nx << " ny=" << g.ny << " lx=" << format_double(g.lx)
       << " ly=" << format_double(g.ly)
       << " bc=" << (g.periodic() ? 'p' : 'b') << '\n';
    return os.str();
}

/// key=value token parser tracking byte offsets for error reporting.
struct HeaderCursor {
    const std::string& line;
    std::size_t pos = 0;

    std::string expect_field(const std::string& key) {
        if (pos >= line.size() || line[pos] != ' ')
            throw FormatError("snapshot header: expected space before " + key, pos);
        ++pos;
        const std::string prefix = key + "=";
        if (line.compare(pos, prefix.size(), prefix) != 0)
            throw FormatError("snapshot header: expected " + prefix, pos);
        pos += prefix.size();
        const std::size_t start = pos;
        while (pos < line.size() && line[pos] != ' ') ++pos;
        return line.substr(start, pos - start);
    }
};

}  // namespace

std::string format_double(double x) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

double parse_double(const std::string& s) {
    double v = 0.0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw FormatError("malformed float '" + s + "'", 0);
    return v;
}

void write_snapshot(const std::string& path, const ScalarField& f) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    const std::string h = header_line(false, f.grid());
    out.write(h.data(), static_cast<std::streamsize>(h.size()));
    write_doubles_le(out, f.data(), f.size());
    if (!out) throw IoError("write failed: " + path);
}

void write_snapshot(const std::string& path, const VectorField& v) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    const std::string h = header_line(true, v.grid());
    out.write(h.data(), static_cast<std::streamsize>(h.size()));
    write_doubles_le(out, v.ux_data(), v.ux_size());
    write_doubles_le(out, v.uy_data(), v.uy_size());
    if (!out) throw IoError("write failed: " + path);
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);

    std::string line;
    if (!std::getline(in, line))
        throw FormatError("snapshot: missing header line", 0);
    if (line.compare(0, std::strlen(kMagic), kMagic) != 0)
        throw FormatError("snapshot: bad magic", 0);

    HeaderCursor cur{line, std::strlen(kMagic)};
    const std::string kind = cur.expect_field("kind");
    if (kind != "scalar" && kind != "vector")
        throw FormatError("snapshot: kind must be scalar or vector", cur.pos);
    const std::string snx = cur.expect_field("nx");
    const std::string sny = cur.expect_field("ny");
    const std::string slx = cur.expect_field("lx");
    const std::string sly = cur.expect_field("ly");
    const std::string sbc = cur.expect_field("bc");
    if (cur.pos != line.size())
        throw FormatError("snapshot: trailing junk in header", cur.pos);

    int nx = 0, ny = 0;
    {
        auto r = std::from_chars(snx.data(), snx.data() + snx.size(), nx);
        if (r.ec != std::errc() || r.ptr != snx.data() + snx.size())
            throw FormatError("snapshot: malformed nx", 0);
        r = std::from_chars(sny.data(), sny.data() + sny.size(), ny);
        if (r.ec != std::errc() || r.ptr != sny.data() + sny.size())
            throw FormatError("snapshot: malformed ny", 0);
    }
    const double lx = parse_double(slx);
    const double ly = parse_double(sly);
    if (sbc != "p" && sbc != "b")
        throw FormatError("snapshot: bc must be p or b", 0);

    Grid g;
    try {
        g = Grid(nx, ny, lx, ly,
                 sbc == "p" ? BoundaryMode::Periodic : BoundaryMode::Box);
    } catch (const ConfigError& e) {
        throw FormatError(std::string("snapshot: ") + e.what(), 0);
    }

    const std::size_t header_bytes = line.size() + 1;
    Snapshot snap;
    if (kind == "scalar") {
        snap.is_vector = false;
        snap.scalar = ScalarField(g);
        read_doubles_le(in, snap.scalar.data(), snap.scalar.size(), header_bytes);
    } else {
        snap.is_vector = true;
        snap.vector = VectorField(g);
        read_doubles_le(in, snap.vector.ux_data(), snap.vector.ux_size(), header_bytes);
        read_doubles_le(in, snap.vector.uy_data(), snap.vector.uy_size(),
                        header_bytes + snap.vector.ux_size() * sizeof(double));
    }
    // must be exactly at EOF
    char extra;
    if (in.read(&extra, 1); in.gcount() != 0)
        throw FormatError("snapshot: trailing bytes after payload",
                          header_bytes);
    return snap;
}

}  // namespace nlchns
