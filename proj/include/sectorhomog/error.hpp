#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sectorhomog {

enum class ErrorKind {
    Config,
    EmptyRegion,
    NotFound,
    Assembly,
    NonConvergence,
    NonSpd,
    Singularity,
    Resolution,
    Rank,
    Gauge,
    Unsupported,
    NotNormalizable,
    InvalidCutoff,
    Fit,
    Io,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so the CLI can map it
/// to a structured message and exit code.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class NonConvergenceError : public Error {
public:
    NonConvergenceError(const std::string& what, std::vector<double> history)
        : Error(ErrorKind::NonConvergence, what), history_(std::move(history)) {}

    const std::vector<double>& residual_history() const noexcept { return history_; }

private:
    std::vector<double> history_;
};

}  // namespace sectorhomog
