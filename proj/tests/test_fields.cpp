/// @file test_fields.cpp
/// @brief Discrete-calculus audits: adjointness, accuracy order, trilinear
///        antisymmetry, quadrature norms, snapshot round-trip.

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

#include "nlchns/errors.hpp"
#include "nlchns/field.hpp"
#include "nlchns/ops.hpp"
#include "nlchns/rng.hpp"
#include "nlchns/snapshot.hpp"

using namespace nlchns;

namespace {

constexpr double pi = std::numbers::pi;

VectorField random_vector(const Grid& g, Rng& rng) {
    VectorField v(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) v.ux(i, j) = rng.normal();
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) v.uy(i, j) = rng.normal();
    v.enforce_bc();
    return v;
}

ScalarField random_scalar(const Grid& g, Rng& rng) {
    ScalarField f(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) f(i, j) = rng.normal();
    return f;
}

}  // namespace

// =============================================================================
// adjointness: <grad f, v> = -<f, div v>
// =============================================================================

TEST_CASE("gradient and divergence are exact adjoints") {
    for (BoundaryMode bc : {BoundaryMode::Periodic, BoundaryMode::Box}) {
        Grid g(24, 16, 1.0, 0.7, bc);
        Rng rng(bc == BoundaryMode::Periodic ? 11u : 12u);
        for (int rep = 0; rep < 20; ++rep) {
            ScalarField f = random_scalar(g, rng);
            VectorField v = random_vector(g, rng);  // box: wall normals zeroed
            const double lhs = dot(gradient(f), v);
            const double rhs = -dot(f, divergence(v));
            CHECK(std::abs(lhs - rhs) <= 1e-13 * (1.0 + std::abs(lhs)));
        }
    }
}

// =============================================================================
// second-order accuracy on smooth fields
// =============================================================================

namespace {

double gradient_error(int n, BoundaryMode bc) {
    Grid g(n, n, 1.0, 1.0, bc);
    ScalarField f(g);
    const bool per = (bc == BoundaryMode::Periodic);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            f(i, j) = per ? std::sin(2 * pi * g.xc(i)) * std::cos(4 * pi * g.yc(j))
                          : std::cos(pi * g.xc(i)) * std::cos(2 * pi * g.yc(j));
    VectorField grad = gradient(f);
    double err = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i <= n; ++i) {
            const double x = g.xf(i), y = g.yc(j);
            const double exact =
                per ? 2 * pi * std::cos(2 * pi * x) * std::cos(4 * pi * y)
                    : -pi * std::sin(pi * x) * std::cos(2 * pi * y);
            err = std::max(err, std::abs(grad.ux(i, j) - exact));
        }
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i < n; ++i) {
            const double x = g.xc(i), y = g.yf(j);
            const double exact =
                per ? -4 * pi * std::sin(2 * pi * x) * std::sin(4 * pi * y)
                    : -2 * pi * std::cos(pi * x) * std::sin(2 * pi * y);
            err = std::max(err, std::abs(grad.uy(i, j) - exact));
        }
    return err;
}

double divergence_error(int n, BoundaryMode bc) {
    Grid g(n, n, 1.0, 1.0, bc);
    VectorField v(g);
    const bool per = (bc == BoundaryMode::Periodic);
    const double kx = per ? 2 * pi : pi;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i <= n; ++i)
            v.ux(i, j) = std::sin(kx * g.xf(i)) * std::cos(kx * g.yc(j));
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i < n; ++i)
            v.uy(i, j) = std::cos(kx * g.xc(i)) * std::sin(kx * g.yf(j));
    v.enforce_bc();
    ScalarField d = divergence(v);
    double err = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double exact =
                2 * kx * std::cos(kx * g.xc(i)) * std::cos(kx * g.yc(j));
            err = std::max(err, std::abs(d(i, j) - exact));
        }
    return err;
}

}  // namespace

TEST_CASE("gradient converges at second order") {
    for (BoundaryMode bc : {BoundaryMode::Periodic, BoundaryMode::Box}) {
        const double e1 = gradient_error(16, bc);
        const double e2 = gradient_error(32, bc);
        const double e3 = gradient_error(64, bc);
        CHECK(std::log2(e1 / e2) >= 1.9);
        CHECK(std::log2(e2 / e3) >= 1.9);
    }
}

TEST_CASE("divergence converges at second order") {
    for (BoundaryMode bc : {BoundaryMode::Periodic, BoundaryMode::Box}) {
        const double e1 = divergence_error(16, bc);
        const double e2 = divergence_error(32, bc);
        const double e3 = divergence_error(64, bc);
        CHECK(std::log2(e1 / e2) >= 1.9);
        CHECK(std::log2(e2 / e3) >= 1.9);
    }
}

// =============================================================================
// trilinear form
// =============================================================================

TEST_CASE("trilinear form is antisymmetric in its last two slots") {
    int cases = 0;
    for (BoundaryMode bc : {BoundaryMode::Periodic, BoundaryMode::Box}) {
        Grid g(16, 16, 1.0, 1.0, bc);
        Rng rng(bc == BoundaryMode::Periodic ? 21u : 22u);
        for (int rep = 0; rep < 50; ++rep) {
            VectorField u = random_vector(g, rng);
            VectorField v = random_vector(g, rng);
            VectorField w = random_vector(g, rng);
            const double bvw = trilinear_b(u, v, w);
            const double bwv = trilinear_b(u, w, v);
            CHECK(std::abs(bvw + bwv) <= 1e-12 * (1.0 + std::abs(bvw)));
            ++cases;
        }
    }
    CHECK(cases == 100);
}

TEST_CASE("advection operator is energy-neutral for solenoidal transport") {
    for (BoundaryMode bc : {BoundaryMode::Periodic, BoundaryMode::Box}) {
        Grid g(24, 24, 1.0, 1.0, bc);
        Rng rng(bc == BoundaryMode::Periodic ? 31u : 32u);
        for (int rep = 0; rep < 10; ++rep) {
            VectorField u = random_solenoidal(g, rng, 4, 1.0);
            VectorField v = random_vector(g, rng);
            const double e = dot(advect_velocity(u, v), v);
            const double scale = dot(v, v);
            CHECK(std::abs(e) <= 1e-12 * (1.0 + scale));
        }
    }
}

TEST_CASE("random_solenoidal is discretely divergence-free") {
    for (BoundaryMode bc : {BoundaryMode::Periodic, BoundaryMode::Box}) {
        Grid g(32, 24, 1.0, 1.3, bc);
        Rng rng(41);
        VectorField u = random_solenoidal(g, rng, 5, 2.0);
        ScalarField d = divergence(u);
        // roundoff scale: |psi|/h^2 ~ |u|/h
        CHECK(max_abs(d) <= 1e-11 * norms(u).linf / g.hx());
        if (bc == BoundaryMode::Box) {
            for (int j = 0; j < g.ny; ++j) {
                CHECK(u.ux(0, j) == 0.0);
                CHECK(u.ux(g.nx, j) == 0.0);
            }
        }
    }
}

// =============================================================================
// conservative scalar transport
// =============================================================================

TEST_CASE("advect_scalar moves mass around without creating any") {
    for (BoundaryMode bc : {BoundaryMode::Periodic, BoundaryMode::Box}) {
        Grid g(20, 28, 1.0, 1.0, bc);
        Rng rng(51);
        VectorField u = random_vector(g, rng);
        ScalarField phi = random_scalar(g, rng);
        ScalarField adv = advect_scalar(u, phi);
        double total = 0.0;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) total += adv(i, j);
        total *= g.cell_area();
        CHECK(std::abs(total) <= 1e-12 * (1.0 + norms(adv).l2));
    }
}

// =============================================================================
// norms
// =============================================================================

TEST_CASE("norms carry quadrature weights and satisfy the embedding bound") {
    Grid g(32, 32, 2.0, 1.5, BoundaryMode::Periodic);
    Rng rng(61);
    ScalarField f = random_scalar(g, rng);
    NormSuite n = norms(f);
    const double vol = g.area();
    CHECK(n.l2 <= std::pow(vol, 0.25) * n.l4 * (1 + 1e-13));
    CHECK(n.linf > 0.0);

    // constant field: l2 = c sqrt(|Omega|), h1 seminorm zero
    ScalarField c(g, 3.0);
    NormSuite nc = norms(c);
    CHECK(nc.l2 == doctest::Approx(3.0 * std::sqrt(vol)).epsilon(1e-13));
    CHECK(nc.h1_semi == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(mean(c) == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("vector norms: uniform translation has zero gradient seminorm") {
    Grid g(16, 16, 1.0, 1.0, BoundaryMode::Periodic);
    VectorField v(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) v.ux(i, j) = 2.0;
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) v.uy(i, j) = -1.0;
    NormSuite n = norms(v);
    CHECK(n.h1_semi == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(n.l2 == doctest::Approx(std::sqrt(5.0)).epsilon(1e-13));
    CHECK(n.linf == doctest::Approx(2.0));
}

// =============================================================================
// snapshots
// =============================================================================

TEST_CASE("snapshot round-trip is exact for scalars and vectors") {
    Grid g(16, 12, 1.0, 0.75, BoundaryMode::Box);
    Rng rng(71);
    ScalarField f = random_scalar(g, rng);
    write_snapshot("snap_scalar_tmp.bin", f);
    Snapshot s = read_snapshot("snap_scalar_tmp.bin");
    REQUIRE(!s.is_vector);
    REQUIRE(s.grid() == g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) CHECK(s.scalar(i, j) == f(i, j));

    VectorField v = random_vector(g, rng);
    write_snapshot("snap_vector_tmp.bin", v);
    Snapshot sv = read_snapshot("snap_vector_tmp.bin");
    REQUIRE(sv.is_vector);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) CHECK(sv.vector.ux(i, j) == v.ux(i, j));
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) CHECK(sv.vector.uy(i, j) == v.uy(i, j));

    std::remove("snap_scalar_tmp.bin");
    std::remove("snap_vector_tmp.bin");
}

TEST_CASE("snapshot reader rejects malformed input with byte offsets") {
    // bad magic
    {
        std::FILE* fp = std::fopen("snap_bad_tmp.bin", "wb");
        std::fputs("NOPE nothing\n", fp);
        std::fclose(fp);
        CHECK_THROWS_AS(read_snapshot("snap_bad_tmp.bin"), FormatError);
    }
    // truncated payload
    {
        Grid g(8, 8, 1.0, 1.0, BoundaryMode::Periodic);
        ScalarField f(g, 1.0);
        write_snapshot("snap_trunc_tmp.bin", f);
        // chop the file
        std::FILE* fp = std::fopen("snap_trunc_tmp.bin", "rb");
        std::fseek(fp, 0, SEEK_END);
        long sz = std::ftell(fp);
        std::fclose(fp);
        std::vector<char> buf(static_cast<std::size_t>(sz) - 17);
        fp = std::fopen("snap_trunc_tmp.bin", "rb");
        REQUIRE(std::fread(buf.data(), 1, buf.size(), fp) == buf.size());
        std::fclose(fp);
        fp = std::fopen("snap_trunc_tmp.bin", "wb");
        std::fwrite(buf.data(), 1, buf.size(), fp);
        std::fclose(fp);
        bool threw = false;
        try {
            read_snapshot("snap_trunc_tmp.bin");
        } catch (const FormatError& e) {
            threw = true;
            CHECK(e.byte_offset > 0);
        }
        CHECK(threw);
    }
    std::remove("snap_bad_tmp.bin");
    std::remove("snap_trunc_tmp.bin");
}

TEST_CASE("float text round-trip is exact") {
    for (double x : {0.1, 1.0 / 3.0, 2.0, 1e-300, 6.02214076e23, -0.0}) {
        CHECK(parse_double(format_double(x)) == x);
    }
    CHECK_THROWS_AS(parse_double("1.2.3"), FormatError);
    CHECK_THROWS_AS(parse_double(""), FormatError);
}

// =============================================================================
// grid validation, rng determinism
// =============================================================================

TEST_CASE("grid constructor validates its arguments") {
    CHECK_THROWS_AS(Grid(7, 8, 1.0, 1.0, BoundaryMode::Periodic), ConfigError);
    CHECK_THROWS_AS(Grid(10, 9, 1.0, 1.0, BoundaryMode::Periodic), ConfigError);
    CHECK_THROWS_AS(Grid(8, 8, 0.0, 1.0, BoundaryMode::Periodic), ConfigError);
    CHECK_THROWS_AS(Grid(8, 8, 1.0, -2.0, BoundaryMode::Box), ConfigError);
    CHECK_NOTHROW(Grid(8, 8, 1.0, 1.0, BoundaryMode::Box));
}

TEST_CASE("rng streams are reproducible and children are distinct") {
    Rng a(123), b(123);
    for (int k = 0; k < 100; ++k) CHECK(a.next_u64() == b.next_u64());
    CHECK(child_seed(7, 0) != child_seed(7, 1));
    CHECK(child_seed(7, 0) == child_seed(7, 0));
    Rng n(5);
    double s = 0, s2 = 0;
    const int N = 20000;
    for (int k = 0; k < N; ++k) {
        double z = n.normal();
        s += z;
        s2 += z * z;
    }
    CHECK(std::abs(s / N) < 0.02);
    CHECK(std::abs(s2 / N - 1.0) < 0.03);
}
