#pragma once

// Benchmark integrands for the quadrature experiments, with closed-form
// second derivatives, plus a central finite-difference fallback.

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "starrad/quadrature.hpp"

namespace starrad::integrands {

struct BenchFunction {
    std::string name;
    quad::Interval domain;
    quad::ScalarFunction value;              // throws DomainError outside `domain`
    quad::ScalarFunction second_derivative;  // throws DomainError outside `domain`
};

/// "example1", "example2", "sharkfin".
std::span<const std::string_view> bench_names();

/// Throws ConfigError naming the valid functions if `name` is unknown.
const BenchFunction& bench_function(std::string_view name);

double eval_bench(std::string_view name, double x);
double eval_bench_second_derivative(std::string_view name, double x);

inline double default_fd_step(double x) { return 1e-4 * (1.0 + (x < 0 ? -x : x)); }

/// (f(x-h) - 2 f(x) + f(x+h)) / h^2. With a domain, a stencil that leaves it
/// throws DomainError.
double fd_second_derivative(const quad::ScalarFunction& f, double x, double h,
                            const std::optional<quad::Interval>& domain = std::nullopt);

}  // namespace starrad::integrands
