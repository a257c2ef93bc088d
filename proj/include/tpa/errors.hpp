#pragma once

#include <stdexcept>
#include <string>

namespace tpa {

// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// No guided-mode root exists in the search bracket.
class NoGuidedMode : public Error {
public:
    explicit NoGuidedMode(const std::string& msg) : Error(msg) {}
};

// An iterative routine exhausted its budget before reaching tolerance.
class NonConvergence : public Error {
public:
    explicit NonConvergence(const std::string& msg) : Error(msg) {}
};

// A propagation constant violates the guided-mode bound.
class InvalidEigenvalue : public Error {
public:
    explicit InvalidEigenvalue(const std::string& msg) : Error(msg) {}
};

// An evaluation point lies inside the waveguide core where no atoms sit.
class PointInsideCore : public Error {
public:
    explicit PointInsideCore(const std::string& msg) : Error(msg) {}
};

// Argument left the documented accuracy region of a special function.
class AccuracyDomainExceeded : public Error {
public:
    explicit AccuracyDomainExceeded(const std::string& msg) : Error(msg) {}
};

// A discrete spectral sum did not converge under grid refinement.
class GridTooCoarse : public Error {
public:
    explicit GridTooCoarse(const std::string& msg) : Error(msg) {}
};

// Torus minor/principal diameter ratio too large for the thin-ring model.
class AspectRatioViolation : public Error {
public:
    explicit AspectRatioViolation(const std::string& msg) : Error(msg) {}
};

// An adaptive ODE step controller could not meet its local tolerance.
class StepFailure : public Error {
public:
    explicit StepFailure(const std::string& msg) : Error(msg) {}
};

// A pre-scan found more than one interior maximum where one was required.
class NotUnimodal : public Error {
public:
    explicit NotUnimodal(const std::string& msg) : Error(msg) {}
};

// Invalid or inconsistent configuration input.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// File system failure while reading or writing results.
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

}  // namespace tpa
