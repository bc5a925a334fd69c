#pragma once

// Property battery behind `starrad verify`. The allocation and bound
// functions are injectable so that tampered versions can be shown to fail.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "starrad/pde.hpp"
#include "starrad/quadrature.hpp"

namespace starrad::cli {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string measured;
};

using AllocateFn = std::function<std::vector<int>(std::span<const double>, int)>;
using BoundsFn = std::function<quad::ErrorBounds(std::span<const double>, const quad::Interval&, int)>;

struct VerifyOptions {
    AllocateFn allocate = quad::allocate_and_adjust;
    BoundsFn bounds = quad::error_bounds;
    int random_functions = 1000;
    int random_networks = 100;
    int residual_points = 100;
    std::uint64_t seed = 7;
};

CheckResult check_quadrature_golden(std::string_view function, int n, int k, double uniform_pct,
                                    double uniform_tol, double refined_pct, double refined_tol);

/// sum(n_j) == N and n_j >= 1 for random maxima, including zeros and ties.
CheckResult check_allocation_sums(const VerifyOptions& options);

/// B_refined <= B_uniform on random trigonometric polynomials and random (N, k <= N).
CheckResult check_bound_dominance(const VerifyOptions& options);

/// Jet channels against fourth-order central differences of the network
/// output (relative 1e-5), on random tanh networks with 1 and 2 inputs.
CheckResult check_jet_derivatives(const VerifyOptions& options);

/// loss_gradient against central differences over every parameter (relative 1e-4).
CheckResult check_parameter_gradients(const VerifyOptions& options);

/// Densities sum to 1, are non-negative, and are invariant to scaling the values.
CheckResult check_density_normalization(const VerifyOptions& options);

/// Both trapezoid rules integrate random affine functions to 1e-10 relative.
CheckResult check_affine_exactness(const VerifyOptions& options);

/// Analytic solutions give |residual| <= 1e-4 at random interior points.
CheckResult check_analytic_residuals(const VerifyOptions& options);

/// Jet of the analytic solution from five-point central differences.
nn::Jet analytic_jet(const pde::PdeProblem& problem, std::span<const double> p);

std::vector<CheckResult> run_verify(const VerifyOptions& options = {});

/// Prints one PASS/FAIL line per check; returns 0 iff all passed.
int report_checks(std::ostream& out, const std::vector<CheckResult>& checks);

}  // namespace starrad::cli
