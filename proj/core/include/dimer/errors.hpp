// errors.hpp - exception types raised by the dimer core library

#pragma once

#include <stdexcept>
#include <string>

#include "dimer/model.hpp"

namespace dimer {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parameters violate a type invariant (negative decay, non-positive frequency, ...).
class InvalidParameters : public Error {
public:
    using Error::Error;
};

/// A state with non-finite components, or one that is off the spin sphere.
class InvalidState : public Error {
public:
    using Error::Error;
};

/// A closed-form quantity is requested outside the region where it is defined.
class DomainError : public Error {
public:
    using Error::Error;
};

/// The operation only supports a restricted configuration (identical cavities,
/// symmetric photon sector, chi = 0, ...).
class UnsupportedConfiguration : public Error {
public:
    using Error::Error;
};

/// The requested steady-state branch does not exist at these parameters.
class NonexistenceError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double last_residual, int iterations)
        : Error(what), last_residual_(last_residual), iterations_(iterations) {}

    double last_residual() const noexcept { return last_residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    double last_residual_;
    int iterations_;
};

/// A converged root lies outside the physical domain |Z| <= 1/2.
class ConstraintViolation : public Error {
public:
    using Error::Error;
};

/// Z is too close to the equator for the Z-eliminated linearization.
class NearSingularElimination : public Error {
public:
    using Error::Error;
};

/// Dense eigen-solver failure; the message echoes the offending matrix.
class NumericalError : public Error {
public:
    using Error::Error;
};

class IntegratorFailure : public Error {
public:
    IntegratorFailure(const std::string& what, double time, const DimerState& state)
        : Error(what), time_(time), state_(state) {}

    double time() const noexcept { return time_; }
    const DimerState& state() const noexcept { return state_; }

private:
    double time_;
    DimerState state_;
};

/// An analytic stability boundary has no root in the admissible range.
class NoBoundary : public DomainError {
public:
    using DomainError::DomainError;
};

/// Root-finding bracket whose endpoints do not straddle a change.
class BracketError : public Error {
public:
    using Error::Error;
};

/// Mean-field invariant violated at runtime (e.g. a mixed NP/SRP steady state at J > 0).
class InvariantViolation : public Error {
public:
    using Error::Error;
};

}  // namespace dimer
