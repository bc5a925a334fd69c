#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace starrad {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A function evaluation produced a NaN or infinity.
class EvaluationError : public Error {
public:
    EvaluationError(const std::string& what, std::vector<double> location);

    const std::vector<double>& location() const noexcept { return location_; }

private:
    std::vector<double> location_;
};

/// A point or stencil fell outside the domain of a function or problem.
class DomainError : public Error {
public:
    using Error::Error;
};

/// The requested allocation cannot give every sub-interval a trapezoid (k > N).
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration: bad sizes, unknown names, missing point sets.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace starrad
