#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace horizon {

// Input errors map to CLI exit code 2, computation errors to exit code 3.

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InputError : Error {
    using Error::Error;
};

struct ComputeError : Error {
    using Error::Error;
};

struct SchemaError : InputError {
    using InputError::InputError;
};

struct DomainError : InputError {
    using InputError::InputError;
};

// One or more rows failed validation; `lines()` holds the 1-based file line numbers.
class ValidationError : public InputError {
public:
    ValidationError(const std::string& what, std::vector<std::size_t> lines)
        : InputError(what), lines_(std::move(lines)) {}

    const std::vector<std::size_t>& lines() const noexcept { return lines_; }

private:
    std::vector<std::size_t> lines_;
};

// A malformed request field; `field()` is a path such as "path[2].year".
class FieldError : public InputError {
public:
    FieldError(std::string field, const std::string& what) : InputError(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct InsufficientDataError : ComputeError {
    using ComputeError::ComputeError;
};

struct InfeasibleError : ComputeError {
    using ComputeError::ComputeError;
};

struct SolverError : ComputeError {
    using ComputeError::ComputeError;
};

struct CalibrationError : ComputeError {
    using ComputeError::ComputeError;
};

class IntegrationError : public ComputeError {
public:
    IntegrationError(const std::string& what, double t) : ComputeError(what), t_(t) {}
    double time() const noexcept { return t_; }

private:
    double t_;
};

}  // namespace horizon
