#pragma once

// Experiment drivers shared by the command-line tool and the acceptance test.

#include <string>
#include <string_view>
#include <vector>

#include "starrad/quadrature.hpp"
#include "starrad/training.hpp"

namespace starrad::cli {

struct QuadratureCase {
    std::string function;
    int n = 0;
    int k = 0;
    int samples = 0;
    double reference = 0.0;
    double uniform_estimate = 0.0;
    double refined_estimate = 0.0;
    double uniform_error = 0.0;  // percent
    double refined_error = 0.0;  // percent
    quad::ErrorBounds bounds;
    quad::AllocationPlan plan;
};

/// One (N, k) comparison of the uniform and refined rules. `reference` < 0
/// means "compute it"; sweeps pass it in to avoid recomputing.
QuadratureCase run_quadrature_case(std::string_view function, int n, int k, int samples = 100,
                                   double reference = -1.0);

/// Every (N, k) with k in `ks` and max(k, n_min) <= N <= n_max.
std::vector<QuadratureCase> run_quadrature_sweep(std::string_view function, const std::vector<int>& ks,
                                                 int n_min, int n_max, int samples = 100);

/// Trains every config, up to `threads` at a time (0: hardware concurrency).
/// Results come back in input order; each run owns its state.
std::vector<train::TrainTrace> run_trainings(const std::vector<train::TrainConfig>& configs,
                                             unsigned threads = 0);

/// First recorded epoch from which the l2 error stays within a factor of
/// `factor` (either way) of its final value.
int settling_epoch(const train::TrainTrace& trace, double factor);

}  // namespace starrad::cli
