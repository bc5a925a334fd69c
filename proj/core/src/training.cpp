#include "starrad/training.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "starrad/adam.hpp"
#include "starrad/errors.hpp"

namespace starrad::train {

namespace {

std::uint64_t event_seed(std::uint64_t seed, std::uint64_t event) {
    // splitmix64 finalizer over (seed, event)
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (event + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

void TrainConfig::validate() const {
    spec.validate();
    if (epochs < 1) throw ConfigError("epochs must be positive");
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
    if (n_collocation < 1) throw ConfigError("n_collocation must be positive");
    if (pool_size < 1) throw ConfigError("pool_size must be positive");
    if (n_collocation > pool_size) {
        throw ConfigError("n_collocation (" + std::to_string(n_collocation) +
                          ") exceeds pool_size (" + std::to_string(pool_size) + ")");
    }
    if (resample_period < 1) throw ConfigError("resample_period must be positive");
    if (resample_period > epochs) throw ConfigError("resample_period exceeds epochs");
    if (record_every < 1) throw ConfigError("record_every must be positive");
    if (!(tau >= 0.0) || !(c >= 0.0)) throw ConfigError("tau and c must be non-negative");
}

TrainConfig preset(std::string_view problem) {
    TrainConfig cfg;
    cfg.problem = std::string(problem);
    if (problem == "newton") {
        cfg.spec = nn::NetworkSpec{1, {100, 100, 100, 100}, nn::Activation::Relu, 1};
        cfg.epochs = 30000;
        cfg.learning_rate = 1e-5;
        cfg.n_collocation = 40;
        cfg.pool_size = 4000;
    } else if (problem == "brinkman") {
        cfg.spec = nn::NetworkSpec{1, {20, 20, 20}, nn::Activation::Tanh, 1};
        cfg.epochs = 30000;
        cfg.learning_rate = 1e-3;
        cfg.n_collocation = 30;
        cfg.pool_size = 4000;
    } else if (problem == "poisson2d") {
        cfg.spec = nn::NetworkSpec{2, {20, 20, 20}, nn::Activation::Tanh, 1};
        cfg.epochs = 20000;
        cfg.learning_rate = 1e-3;
        cfg.n_collocation = 400;
        cfg.pool_size = 40000;
    } else {
        throw ConfigError("unknown problem '" + std::string(problem) +
                          "'; valid: newton, brinkman, poisson2d");
    }
    return cfg;
}

double TrainTrace::l2_at(int epoch) const {
    for (const auto& row : rows) {
        if (row.epoch == epoch) return row.l2_test_error;
    }
    throw ConfigError("epoch " + std::to_string(epoch) + " was not recorded");
}

nn::PointSet test_grid(const pde::PdeProblem& problem) {
    if (problem.dim() == 1) {
        const auto& axis = problem.domain.axes.front();
        constexpr int kPoints = 1000;
        nn::PointSet grid(1, kPoints);
        for (int i = 0; i < kPoints; ++i) grid(0, i) = axis.node(i, kPoints - 1);
        return grid;
    }
    constexpr int kSide = 100;
    nn::PointSet grid(2, kSide * kSide);
    const auto& ax = problem.domain.axes[0];
    const auto& ay = problem.domain.axes[1];
    for (int i = 0; i < kSide; ++i) {
        for (int j = 0; j < kSide; ++j) {
            grid(0, i * kSide + j) = ax.lo() + ax.width() * (i + 0.5) / kSide;
            grid(1, i * kSide + j) = ay.lo() + ay.width() * (j + 0.5) / kSide;
        }
    }
    return grid;
}

Eigen::VectorXd squared_error_field(const pde::PdeProblem& problem, const nn::ParameterVector& params,
                                    const nn::NetworkSpec& spec) {
    const nn::PointSet grid = test_grid(problem);
    const Eigen::RowVectorXd u = nn::forward_values(params, spec, grid);
    Eigen::VectorXd err(grid.cols());
    for (Eigen::Index i = 0; i < grid.cols(); ++i) {
        const double exact = problem.analytic({grid.col(i).data(), static_cast<std::size_t>(grid.rows())});
        err(i) = (exact - u(i)) * (exact - u(i));
    }
    return err;
}

double l2_test_error(const pde::PdeProblem& problem, const nn::ParameterVector& params,
                     const nn::NetworkSpec& spec) {
    return squared_error_field(problem, params, spec).mean();
}

double l2_test_error(const pde::PdeProblem& problem,
                     const std::function<double(std::span<const double>)>& surrogate) {
    const nn::PointSet grid = test_grid(problem);
    double total = 0.0;
    for (Eigen::Index i = 0; i < grid.cols(); ++i) {
        const std::span<const double> p(grid.col(i).data(), static_cast<std::size_t>(grid.rows()));
        const double d = problem.analytic(p) - surrogate(p);
        total += d * d;
    }
    return total / static_cast<double>(grid.cols());
}

TrainTrace train(const TrainConfig& config) {
    config.validate();
    const pde::PdeProblem problem = pde::make_problem(config.problem, config.constants);
    if (config.spec.input_dim != problem.dim()) {
        throw ConfigError("network input_dim " + std::to_string(config.spec.input_dim) +
                          " does not match " + problem.name + " (dimension " +
                          std::to_string(problem.dim()) + ")");
    }
    const sampling::DensityParams density{config.tau, config.c};

    TrainTrace trace;
    nn::ParameterVector params = nn::init_network(config.spec, config.seed);
    nn::AdamState adam = nn::AdamState::fresh(static_cast<Eigen::Index>(params.size()), config.learning_rate);
    nn::PointSet collocation =
        sampling::make_candidates(problem.domain, config.n_collocation, config.seed, 0);

    const auto start = std::chrono::steady_clock::now();
    const auto elapsed = [&start] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };
    const auto record = [&](int epoch) {
        TraceRow row;
        row.epoch = epoch;
        row.train_loss = pde::composite_loss(problem, params, config.spec, collocation, config.weights);
        row.l2_test_error = l2_test_error(problem, params, config.spec);
        row.seconds = elapsed();
        trace.rows.push_back(row);
        return std::isfinite(row.train_loss);
    };

    record(0);
    for (int step = 0; step < config.epochs; ++step) {
        if (step > 0 && step % config.resample_period == 0) {
            const auto event = static_cast<std::uint64_t>(step / config.resample_period);
            const auto pool = sampling::build_pool(config.criterion, density, problem, params,
                                                   config.spec, config.pool_size, config.seed, event);
            collocation = sampling::sample_collocation(pool, config.n_collocation,
                                                       event_seed(config.seed, event));
            trace.resample_epochs.push_back(step);
        }

        try {
            const auto lg = pde::composite_loss_gradient(problem, params, config.spec, collocation,
                                                         config.weights);
            nn::adam_step(adam, params.values(), lg.gradient);
        } catch (const EvaluationError& e) {
            trace.failed_epoch = step + 1;
            trace.failure = e.what();
            break;
        }

        const int done = step + 1;
        if (done % config.record_every == 0 || done == config.epochs) {
            if (!record(done)) {
                trace.failed_epoch = done;
                trace.failure = "non-finite training loss";
                break;
            }
        }
    }
    trace.final_params = std::move(params);
    trace.final_collocation = std::move(collocation);
    return trace;
}

}  // namespace starrad::train
