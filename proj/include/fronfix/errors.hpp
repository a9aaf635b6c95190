#pragma once

#include <stdexcept>
#include <string>

namespace fronfix {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input outside the admissible domain (bad parameters, bad shapes).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A numerical failure during a solve. `step()` is the time level being
/// computed when the failure happened, or -1 when not tied to a step.
class NumericalError : public Error {
public:
    NumericalError(const std::string& what, int step = -1)
        : Error(what), step_(step) {}

    int step() const noexcept { return step_; }

private:
    int step_;
};

class SingularPivotError : public NumericalError {
public:
    SingularPivotError(std::size_t row, double pivot);

    std::size_t row() const noexcept { return row_; }
    double pivot() const noexcept { return pivot_; }

private:
    std::size_t row_;
    double pivot_;
};

class DenominatorNearZeroError : public NumericalError {
public:
    DenominatorNearZeroError(int step, double denominator, double floor);

    double denominator() const noexcept { return denominator_; }
    double floor() const noexcept { return floor_; }

private:
    double denominator_;
    double floor_;
};

class NonConvergenceError : public NumericalError {
public:
    NonConvergenceError(int step, int iterations, double last, double previous);

    int iterations() const noexcept { return iterations_; }
    double last_iterate() const noexcept { return last_; }
    double previous_iterate() const noexcept { return previous_; }

private:
    int iterations_;
    double last_;
    double previous_;
};

}  // namespace fronfix
