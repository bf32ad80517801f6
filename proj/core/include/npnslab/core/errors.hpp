#pragma once

#include <stdexcept>
#include <string>

namespace npnslab {

/// Malformed or inconsistent input data (traces, fields, grids).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Physical or numerical parameter outside its admissible range.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Function evaluated outside its domain (log of a non-positive concentration, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Lower-order data missing when building a higher-order object.
class SequencingError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Range of a field, attached to solver failures.
struct FieldExtrema {
    double min_c1 = 0.0;
    double max_c1 = 0.0;
    double min_c2 = 0.0;
    double max_c2 = 0.0;
};

/// A time step could not be completed (singular frozen-coefficient system, lost positivity).
class StepError : public std::runtime_error {
public:
    StepError(const std::string& what, double t, FieldExtrema ext)
        : std::runtime_error(what), time_(t), extrema_(ext) {}

    [[nodiscard]] double time() const noexcept { return time_; }
    [[nodiscard]] const FieldExtrema& extrema() const noexcept { return extrema_; }

private:
    double time_;
    FieldExtrema extrema_;
};

/// A concentration left [lambda_i - tol, Lambda_i + tol] during a run.
class MaxPrincipleViolation : public StepError {
public:
    using StepError::StepError;
};

/// Half-line layer solve truncated too early.
class TruncationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace npnslab
