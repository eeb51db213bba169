// errors.hpp - exception types shared by the superrad modules
#pragma once

#include <stdexcept>
#include <string>

namespace superrad {

/// Argument outside the mathematical domain of an operation (negative time, gamma <= 0, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Discrete argument outside the supported table range (e.g. J1 zero index > 50).
class RangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// A series did not reach its truncation bound within the term cap.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double partial_sum, double remaining_bound, int terms)
        : std::runtime_error(what), partial_sum_(partial_sum), bound_(remaining_bound), terms_(terms) {}

    double partial_sum() const noexcept { return partial_sum_; }
    double remaining_bound() const noexcept { return bound_; }
    int terms() const noexcept { return terms_; }

private:
    double partial_sum_;
    double bound_;
    int terms_;
};

/// Adaptive quadrature could not certify its absolute tolerance.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double estimate, double error_estimate)
        : std::runtime_error(what), estimate_(estimate), error_(error_estimate) {}

    double estimate() const noexcept { return estimate_; }
    double error_estimate() const noexcept { return error_; }

private:
    double estimate_;
    double error_;
};

/// Sampling grid too coarse for the requested kernel or marching scheme.
class ResolutionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace superrad
