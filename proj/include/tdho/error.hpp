#pragma once

#include <stdexcept>
#include <string>

namespace tdho {

enum class ErrorCategory {
    domain,            // argument outside a function's domain
    positivity,        // mass or auxiliary amplitude not strictly positive
    imaginary_frequency,
    positivity_horizon,
    stiffness,         // integrator step-size collapse
    usage,             // caller violated an API contract
    config,            // malformed run configuration
    box_overflow,      // wavefunction reached the grid boundary
    tolerance,         // a verification check exceeded its threshold
    io,
};

const char* category_name(ErrorCategory c) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(ErrorCategory::domain, what) {}
};

/// Raised when a mass (or any quantity required to be > 0) is not.
/// `where` is the first offending time or coordinate.
class PositivityError : public Error {
public:
    PositivityError(const std::string& what, double where)
        : Error(ErrorCategory::positivity, what), where_(where) {}
    double where() const noexcept { return where_; }

private:
    double where_;
};

class ImaginaryFrequencyError : public Error {
public:
    ImaginaryFrequencyError(const std::string& what, double begin, double end)
        : Error(ErrorCategory::imaginary_frequency, what), begin_(begin), end_(end) {}
    double interval_begin() const noexcept { return begin_; }
    double interval_end() const noexcept { return end_; }

private:
    double begin_, end_;
};

class StiffnessError : public Error {
public:
    StiffnessError(const std::string& what, double t)
        : Error(ErrorCategory::stiffness, what), time_(t) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

class UsageError : public Error {
public:
    explicit UsageError(const std::string& what) : Error(ErrorCategory::usage, what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorCategory::config, what) {}
};

class BoxOverflowError : public Error {
public:
    BoxOverflowError(const std::string& what, double t)
        : Error(ErrorCategory::box_overflow, what), time_(t) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

} // namespace tdho
