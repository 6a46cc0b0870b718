#pragma once

#include <stdexcept>
#include <string>

namespace qcsync {

// Bad input shape or value supplied by a caller (dimension mismatch, out of
// range probability, malformed config).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// The inputs are well-formed but the protocol cannot run on them, e.g. an
// initial fidelity at or below 1/2.
class PreconditionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A computed object broke one of its numerical invariants.
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class NonUnitaryError : public ConfigError {
public:
    NonUnitaryError(const std::string& what, double residual)
        : ConfigError(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

// A measurement sampled a branch whose probability is numerically zero.
class DegenerateBranchError : public InvariantError {
public:
    using InvariantError::InvariantError;
};

// A party received an event it cannot handle in its current phase.
class ProtocolOrderError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Monte Carlo purification ran out of pairs to combine.
class ExhaustionError : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

}  // namespace qcsync
