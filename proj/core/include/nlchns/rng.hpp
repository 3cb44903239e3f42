#pragma once
/// @file rng.hpp
/// @brief Deterministic random streams.
///
/// std::*_distribution output is implementation-defined, which would break
/// the bitwise-reproducibility contract of run manifests.  We use SplitMix64
/// with a fixed child-seed derivation rule, uniforms from the top 53 bits,
/// and Box-Muller normals.  Identical seeds give identical streams on every
/// conforming platform.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace nlchns {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Child-stream derivation rule, recorded in run manifests: the k-th child
/// of a root seed is one SplitMix64 step of root ^ ((k+1) * golden).
inline std::uint64_t child_seed(std::uint64_t root, std::uint64_t k) {
    std::uint64_t s = root ^ ((k + 1) * 0x9e3779b97f4a7c15ull);
    return splitmix64_next(s);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64_next(state_); }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Standard normal via Box-Muller (pairs cached).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log1p(-u1));
        const double t = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

private:
    std::uint64_t state_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace nlchns
