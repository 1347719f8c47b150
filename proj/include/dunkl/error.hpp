#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dunkl {

// Base of every library error. Each subtype names one failure contract.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Group closure did not terminate below the configured element cap.
class GroupNotFinite : public Error {
public:
    using Error::Error;
};

// An exact identity that must hold by construction was violated.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class UnsupportedVariant : public Error {
public:
    using Error::Error;
};

class NumericalInstability : public Error {
public:
    using Error::Error;
};

class ThresholdTooSmall : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// Non-finite integrand value; carries the offending node.
class EvaluationError : public Error {
public:
    EvaluationError(const std::string& what, std::vector<double> node)
        : Error(what), node_(std::move(node)) {}
    const std::vector<double>& node() const { return node_; }

private:
    std::vector<double> node_;
};

}  // namespace dunkl
