#pragma once

#include <stdexcept>
#include <string>

namespace rfcsim {

/// Base class of every error thrown by the simulator library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A machine, exciter or grid parameter violates its invariants.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// The scenario file (or an override) does not match the documented schema.
class ScenarioError : public Error {
public:
    ScenarioError(const std::string& what, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

/// The steady-state computation failed (load flow did not converge, limits hit).
class InitError : public Error {
public:
    using Error::Error;
};

/// The admittance matrix could not be factorized.
class SolveError : public Error {
public:
    using Error::Error;
};

/// Time integration had to stop (non-positive speed, non-finite state).
class IntegrationError : public Error {
public:
    using Error::Error;
};

}  // namespace rfcsim
