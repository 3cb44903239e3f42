#pragma once
/// @file errors.hpp
/// @brief Error taxonomy for the solver library.
///
/// Everything thrown by the library derives from Error.  The CLI maps the
/// three branches to process exit codes: ConfigError -> 2, numerical
/// failures -> 3, I/O and format failures -> 4.

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nlchns {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// ---- configuration / validation -------------------------------------------

/// Rejected configuration: unknown key, malformed value, or a failed
/// model-assumption audit (coercivity, admissible ranges, regime pairing).
class ConfigError : public Error {
public:
    using Error::Error;
};

// ---- numerical failures ----------------------------------------------------

/// Two fields (or a field and an operator) built on different grids met.
class GridMismatch : public Error {
public:
    using Error::Error;
};

/// Sampled kernel stencil violated J(x) = J(-x).
class NonsymmetricKernel : public Error {
public:
    using Error::Error;
};

/// Singular potential or degenerate mobility evaluated outside its domain.
/// Never clamped: out-of-range phase values are hard errors.
class PhaseOutOfRange : public Error {
public:
    PhaseOutOfRange(const std::string& where, int i, int j, double value)
        : Error(where + ": phase value " + std::to_string(value) +
                " out of admissible range at cell (" + std::to_string(i) +
                "," + std::to_string(j) + ")"),
          i(i), j(j), value(value) {}
    int i = -1, j = -1;
    double value = 0.0;
};

/// Nonlinear implicit solve failed to reach its residual target.
class NewtonDiverged : public Error {
public:
    NewtonDiverged(int iterations, double residual)
        : Error("implicit solve diverged after " + std::to_string(iterations) +
                " iterations, residual " + std::to_string(residual)),
          iterations(iterations), residual(residual) {}
    int iterations = 0;
    double residual = 0.0;
};

/// Advective CFL number exceeded its limit even at the minimum step size.
class CFLViolation : public Error {
public:
    CFLViolation(double cfl, double limit)
        : Error("CFL number " + std::to_string(cfl) + " exceeds limit " +
                std::to_string(limit) + " at minimum step size"),
          cfl(cfl), limit(limit) {}
    double cfl = 0.0, limit = 0.0;
};

/// Linear iterative solve (CG) stalled above tolerance.
class NoConvergence : public Error {
public:
    NoConvergence(const std::string& where, int iterations, double residual)
        : Error(where + ": no convergence after " + std::to_string(iterations) +
                " iterations, residual " + std::to_string(residual)),
          iterations(iterations), residual(residual) {}
    int iterations = 0;
    double residual = 0.0;
};

/// A quantity that must be mean-free (or mean-preserving) drifted.
class NonzeroMean : public Error {
public:
    explicit NonzeroMean(double mean_value)
        : Error("mean constraint violated, drift " + std::to_string(mean_value)),
          mean_value(mean_value) {}
    double mean_value = 0.0;
};

/// Viscosity profile left its configured positive range.
class ViscosityRangeViolation : public Error {
public:
    using Error::Error;
};

// ---- diagnostics preconditions ---------------------------------------------

/// Trajectory has too few samples for the requested audit.
class TrajectoryTooShort : public Error {
public:
    using Error::Error;
};

/// Audit requires a uniform sample grid and the data is not uniform.
class NonuniformSampling : public Error {
public:
    using Error::Error;
};

/// Pointwise-modulus audit needs at least three stored snapshots.
class InsufficientSnapshots : public Error {
public:
    using Error::Error;
};

// ---- I/O -------------------------------------------------------------------

/// Malformed snapshot / CSV / manifest; carries the byte offset of the
/// first offending byte.
class FormatError : public Error {
public:
    FormatError(const std::string& what, std::size_t byte_offset)
        : Error(what + " (byte offset " + std::to_string(byte_offset) + ")"),
          byte_offset(byte_offset) {}
    std::size_t byte_offset = 0;
};

/// File could not be opened, read, or written.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace nlchns
