#include "starrad/cli/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "starrad/errors.hpp"
#include "starrad/integrands.hpp"

namespace starrad::cli {

QuadratureCase run_quadrature_case(std::string_view function, int n, int k, int samples,
                                   double reference) {
    const auto& bench = integrands::bench_function(function);
    QuadratureCase c;
    c.function = bench.name;
    c.n = n;
    c.k = k;
    c.samples = samples;
    c.reference = reference < 0.0 ? quad::reference_integral(bench.value, bench.domain) : reference;
    c.uniform_estimate = quad::uniform_trapezoid_integrate(bench.value, bench.domain, n);
    auto refined = quad::refined_trapezoid_integrate(bench.value, bench.second_derivative,
                                                     bench.domain, n, k, samples);
    c.refined_estimate = refined.estimate;
    c.plan = std::move(refined.plan);
    c.uniform_error = quad::relative_error_percent(c.uniform_estimate, c.reference);
    c.refined_error = quad::relative_error_percent(c.refined_estimate, c.reference);
    c.bounds = quad::error_bounds(c.plan.maxima, bench.domain, n);
    return c;
}

std::vector<QuadratureCase> run_quadrature_sweep(std::string_view function, const std::vector<int>& ks,
                                                 int n_min, int n_max, int samples) {
    const auto& bench = integrands::bench_function(function);
    const double reference = quad::reference_integral(bench.value, bench.domain);
    std::vector<QuadratureCase> out;
    for (int k : ks) {
        for (int n = std::max(k, n_min); n <= n_max; ++n)
            out.push_back(run_quadrature_case(function, n, k, samples, reference));
    }
    return out;
}

std::vector<train::TrainTrace> run_trainings(const std::vector<train::TrainConfig>& configs,
                                             unsigned threads) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(configs.size()));

    std::vector<train::TrainTrace> traces(configs.size());
    std::vector<std::exception_ptr> errors(configs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) {
            try {
                traces[i] = train::train(configs[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return traces;
}

int settling_epoch(const train::TrainTrace& trace, double factor) {
    if (trace.rows.empty()) throw ConfigError("empty trace");
    const double final_error = trace.rows.back().l2_test_error;
    int epoch = trace.rows.back().epoch;
    for (auto it = trace.rows.rbegin(); it != trace.rows.rend(); ++it) {
        if (it->l2_test_error > factor * final_error || it->l2_test_error < final_error / factor)
            break;
        epoch = it->epoch;
    }
    return epoch;
}

}  // namespace starrad::cli
