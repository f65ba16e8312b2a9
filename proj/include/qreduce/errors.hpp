// errors.hpp — exception types and the process exit codes they map to

#pragma once

#include <stdexcept>
#include <string>

namespace qreduce {

// Exit codes used by the command-line front end:
// 0 ok, 2 config, 3 numeric/truncation, 4 io, 5 oracle-check failure.
enum class ExitCode : int {
    ok = 0,
    config = 2,
    numeric = 3,
    io = 4,
    oracle = 5,
};

class Error : public std::runtime_error {
  public:
    Error(const std::string& msg, ExitCode code)
        : std::runtime_error(msg), code_(code) {}
    int exit_code() const noexcept { return static_cast<int>(code_); }

  private:
    ExitCode code_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& m) : Error("config error: " + m, ExitCode::config) {}
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& m)
        : Error("dimension mismatch: " + m, ExitCode::numeric) {}
};

// The Fock truncation cannot represent the requested state to tolerance;
// the caller must raise n_max.
struct CutoffTooSmall : Error {
    explicit CutoffTooSmall(const std::string& m)
        : Error("cutoff too small: " + m, ExitCode::numeric) {}
};

// The runtime truncation monitor tripped during integration.
struct CutoffExceeded : Error {
    explicit CutoffExceeded(const std::string& m)
        : Error("cutoff exceeded: " + m, ExitCode::numeric) {}
};

// An amplitude became NaN/Inf; usually means the step size is too large.
struct NonFiniteAmplitude : Error {
    explicit NonFiniteAmplitude(const std::string& m)
        : Error("non-finite amplitude: " + m, ExitCode::numeric) {}
};

struct DegenerateBranch : Error {
    explicit DegenerateBranch(const std::string& m)
        : Error("degenerate branch: " + m, ExitCode::config) {}
};

struct InsufficientPoints : Error {
    explicit InsufficientPoints(const std::string& m)
        : Error("insufficient points: " + m, ExitCode::config) {}
};

struct NonPositiveInput : Error {
    explicit NonPositiveInput(const std::string& m)
        : Error("non-positive input: " + m, ExitCode::config) {}
};

struct EmptySample : Error {
    explicit EmptySample(const std::string& m)
        : Error("empty sample: " + m, ExitCode::config) {}
};

struct EnsembleInvalid : Error {
    explicit EnsembleInvalid(const std::string& m)
        : Error("ensemble invalid: " + m, ExitCode::numeric) {}
};

struct IoError : Error {
    explicit IoError(const std::string& m) : Error("io error: " + m, ExitCode::io) {}
};

} // namespace qreduce
