#pragma once

#include <stdexcept>
#include <string>

namespace synthesol {

struct ChartDomainError : std::runtime_error {
    explicit ChartDomainError(const std::string& what) : std::runtime_error(what) {}
};

struct BlowupError : std::runtime_error {
    double time;
    explicit BlowupError(const std::string& what, double t = 0.0)
        : std::runtime_error(what), time(t) {}
};

struct DegenerateError : std::runtime_error {
    explicit DegenerateError(const std::string& what) : std::runtime_error(what) {}
};

struct TransversalityError : std::runtime_error {
    explicit TransversalityError(const std::string& what) : std::runtime_error(what) {}
};

struct StepTooSmallError : std::runtime_error {
    explicit StepTooSmallError(const std::string& what) : std::runtime_error(what) {}
};

struct NotOnLocusError : std::runtime_error {
    explicit NotOnLocusError(const std::string& what) : std::runtime_error(what) {}
};

struct ConvergenceError : std::runtime_error {
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

struct NewtonDivergenceError : std::runtime_error {
    explicit NewtonDivergenceError(const std::string& what) : std::runtime_error(what) {}
};

struct NoConvergenceError : std::runtime_error {
    explicit NoConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// Config file syntax or validation failure; carries the offending position.
struct ConfigParseError : std::runtime_error {
    int line;
    int column;
    ConfigParseError(const std::string& what, int line_, int column_)
        : std::runtime_error(what + " (line " + std::to_string(line_) + ", column " +
                             std::to_string(column_) + ")"),
          line(line_), column(column_) {}
};

} // namespace synthesol
