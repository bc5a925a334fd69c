#pragma once

// Adaptive-resampling PINN training:
//
//   1. draw N collocation points uniformly, train for one resample period;
//   2. at every multiple of the period, draw a fresh candidate pool, score it
//      with the criterion, build the density, replace all N points;
//   3. keep training with full-batch Adam until the epoch budget is spent.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "starrad/network.hpp"
#include "starrad/pde.hpp"
#include "starrad/sampling.hpp"

namespace starrad::train {

struct TrainConfig {
    std::string problem = "newton";
    std::map<std::string, double> constants;  // overrides of the problem defaults
    nn::NetworkSpec spec;
    sampling::CriterionKind criterion = sampling::CriterionKind::Unif;
    double tau = 0.5;
    double c = 0.0;
    int epochs = 1000;
    double learning_rate = 1e-3;
    Eigen::Index n_collocation = 30;
    Eigen::Index pool_size = 4000;
    int resample_period = 1000;
    pde::LossWeights weights;
    std::uint64_t seed = 0;
    int record_every = 100;

    /// Throws ConfigError on n_collocation > pool_size, resample_period > epochs, ...
    void validate() const;
};

/// The published setting of each problem: architecture, learning rate,
/// collocation budget, pool size and epoch count.
TrainConfig preset(std::string_view problem);

struct TraceRow {
    int epoch = 0;
    double train_loss = 0.0;
    double l2_test_error = 0.0;
    double seconds = 0.0;

    friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

struct TrainTrace {
    std::vector<TraceRow> rows;       // epoch 0, every record_every epochs, and the last epoch
    std::vector<int> resample_epochs; // epochs after which the collocation set was replaced
    nn::ParameterVector final_params;
    nn::PointSet final_collocation;
    std::optional<int> failed_epoch;  // set when a non-finite loss aborted training
    std::string failure;

    bool ok() const noexcept { return !failed_epoch.has_value(); }
    /// l2 error of the row at `epoch`; throws ConfigError if it was not recorded.
    double l2_at(int epoch) const;
};

TrainTrace train(const TrainConfig& config);

/// 1000 equispaced points on [lo, hi] for 1D problems, the 100 x 100 grid of
/// cell centres of the unit square for poisson2d.
nn::PointSet test_grid(const pde::PdeProblem& problem);

/// Mean over the test grid of (analytic - u_theta)^2.
double l2_test_error(const pde::PdeProblem& problem, const nn::ParameterVector& params,
                     const nn::NetworkSpec& spec);

/// Same metric for an arbitrary surrogate u.
double l2_test_error(const pde::PdeProblem& problem,
                     const std::function<double(std::span<const double>)>& surrogate);

/// Squared error of u_theta at every test-grid point.
Eigen::VectorXd squared_error_field(const pde::PdeProblem& problem, const nn::ParameterVector& params,
                                    const nn::NetworkSpec& spec);

}  // namespace starrad::train
