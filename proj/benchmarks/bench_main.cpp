#include <benchmark/benchmark.h>

#include "starrad/integrands.hpp"
#include "starrad/pde.hpp"
#include "starrad/quadrature.hpp"
#include "starrad/sampling.hpp"
#include "starrad/training.hpp"

using namespace starrad;

static void BM_UniformTrapezoid(benchmark::State& state) {
    const auto& f = integrands::bench_function("example1");
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(quad::uniform_trapezoid_integrate(f.value, f.domain, n));
}
BENCHMARK(BM_UniformTrapezoid)->Arg(25)->Arg(200);

static void BM_RefinedTrapezoid(benchmark::State& state) {
    const auto& f = integrands::bench_function("example2");
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(quad::refined_trapezoid_integrate(f.value, f.second_derivative, f.domain, n, 10));
}
BENCHMARK(BM_RefinedTrapezoid)->Arg(25)->Arg(200);

static void BM_ReferenceIntegral(benchmark::State& state) {
    const auto& f = integrands::bench_function("sharkfin");
    for (auto _ : state) benchmark::DoNotOptimize(quad::reference_integral(f.value, f.domain));
}
BENCHMARK(BM_ReferenceIntegral)->Unit(benchmark::kMillisecond);

static void BM_ForwardJets(benchmark::State& state) {
    const auto cfg = train::preset("poisson2d");
    const auto params = nn::init_network(cfg.spec, 1);
    const auto problem = pde::make_problem("poisson2d");
    const auto points = sampling::make_candidates(problem.domain, state.range(0), 3);
    for (auto _ : state) benchmark::DoNotOptimize(nn::forward_jets(params, cfg.spec, points));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ForwardJets)->Arg(400)->Arg(4000);

static void BM_CompositeLossGradient(benchmark::State& state) {
    const std::string name = state.range(0) == 0 ? "newton" : state.range(0) == 1 ? "brinkman" : "poisson2d";
    const auto cfg = train::preset(name);
    const auto problem = pde::make_problem(name);
    const auto params = nn::init_network(cfg.spec, 1);
    const auto points = sampling::make_candidates(problem.domain, cfg.n_collocation, 3);
    for (auto _ : state)
        benchmark::DoNotOptimize(pde::composite_loss_gradient(problem, params, cfg.spec, points, cfg.weights));
    state.SetLabel(name);
}
BENCHMARK(BM_CompositeLossGradient)->DenseRange(0, 2)->Unit(benchmark::kMicrosecond);

static void BM_BuildPool(benchmark::State& state) {
    const auto cfg = train::preset("brinkman");
    const auto problem = pde::make_problem("brinkman");
    const auto params = nn::init_network(cfg.spec, 1);
    const auto kind = static_cast<sampling::CriterionKind>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(sampling::build_pool(kind, {}, problem, params, cfg.spec, cfg.pool_size, 5, 1));
    state.SetLabel(std::string(sampling::to_string(kind)));
}
BENCHMARK(BM_BuildPool)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

static void BM_SampleIndices(benchmark::State& state) {
    Eigen::VectorXd p = Eigen::VectorXd::LinSpaced(state.range(0), 1.0, 2.0);
    p /= p.sum();
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(sampling::sample_indices(p, 400, seed++));
}
BENCHMARK(BM_SampleIndices)->Arg(4000)->Arg(40000);
BENCHMARK_MAIN();
