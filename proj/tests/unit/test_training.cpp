#include <gtest/gtest.h>

#include <cmath>
#include <ostream>
#include <string>

#include "starrad/errors.hpp"
#include "starrad/training.hpp"

using namespace starrad;

namespace {

train::TrainConfig small(std::string_view problem, sampling::CriterionKind kind, int epochs) {
    auto cfg = train::preset(problem);
    cfg.spec.hidden_layers = {10, 10};
    cfg.criterion = kind;
    cfg.epochs = epochs;
    cfg.pool_size = 500;
    cfg.n_collocation = problem == "poisson2d" ? 60 : cfg.n_collocation;
    cfg.seed = 3;
    return cfg;
}

}  // namespace

TEST(Preset, PublishedSettings) {
    const auto n = train::preset("newton");
    EXPECT_EQ(n.spec.hidden_layers, (std::vector<int>{100, 100, 100, 100}));
    EXPECT_EQ(n.spec.activation, nn::Activation::Relu);
    EXPECT_EQ(n.learning_rate, 1e-5);
    EXPECT_EQ(n.n_collocation, 40);
    EXPECT_EQ(n.pool_size, 4000);
    EXPECT_EQ(n.epochs, 30000);
    const auto b = train::preset("brinkman");
    EXPECT_EQ(b.spec.hidden_layers, (std::vector<int>{20, 20, 20}));
    EXPECT_EQ(b.n_collocation, 30);
    const auto p = train::preset("poisson2d");
    EXPECT_EQ(p.spec.input_dim, 2);
    EXPECT_EQ(p.n_collocation, 400);
    EXPECT_EQ(p.pool_size, 40000);
    EXPECT_EQ(p.epochs, 20000);
    for (const auto& cfg : {n, b, p}) {
        EXPECT_EQ(cfg.tau, 0.5);
        EXPECT_EQ(cfg.c, 0.0);
        EXPECT_EQ(cfg.resample_period, 1000);
    }
    EXPECT_THROW(train::preset("wave"), ConfigError);
}

TEST(TrainConfig, Validation) {
    auto cfg = train::preset("brinkman");
    cfg.n_collocation = cfg.pool_size + 1;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = train::preset("brinkman");
    cfg.epochs = 500;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = train::preset("brinkman");
    cfg.learning_rate = 0.0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    EXPECT_THROW(train::train(cfg), ConfigError);
}

TEST(TestGrid, Shapes) {
    const auto g1 = train::test_grid(pde::make_problem("newton"));
    ASSERT_EQ(g1.cols(), 1000);
    EXPECT_EQ(g1(0, 0), 0.0);
    EXPECT_EQ(g1(0, 999), 1000.0);
    const auto g2 = train::test_grid(pde::make_problem("poisson2d"));
    ASSERT_EQ(g2.cols(), 10000);
    EXPECT_DOUBLE_EQ(g2.minCoeff(), 0.005);
    EXPECT_DOUBLE_EQ(g2.maxCoeff(), 0.995);
}

TEST(L2Error, ExactSurrogateIsZero) {
    for (auto name : pde::problem_names()) {
        const auto p = pde::make_problem(name);
        EXPECT_LE(train::l2_test_error(p, [&](std::span<const double> x) { return p.analytic(x); }), 1e-10);
    }
}

TEST(L2Error, NewtonConstantAmbient) {
    // mean over [0, 1000] of (75 e^{-0.005 t})^2 = 5625 (1 - e^{-10}) / 10
    const auto p = pde::make_problem("newton");
    const double oracle = 562.5 * (1 - std::exp(-10.0));
    const double grid = train::l2_test_error(p, [](std::span<const double>) { return 25.0; });
    EXPECT_NEAR(grid, oracle, 0.01 * oracle);
}

TEST(L2Error, BrinkmanZeroField) {
    // Continuum mean of the analytic solution squared, by adaptive quadrature.
    const auto p = pde::make_problem("brinkman");
    const double grid = train::l2_test_error(p, [](std::span<const double>) { return 0.0; });
    EXPECT_NEAR(grid, 0.85, 0.02 * 0.85);
}

TEST(L2Error, NetworkOverloadAgreesWithSurrogate) {
    const auto p = pde::make_problem("poisson2d");
    const nn::NetworkSpec spec{2, {5}, nn::Activation::Tanh, 1};
    const auto params = nn::init_network(spec, 1);
    const double a = train::l2_test_error(p, params, spec);
    const double b = train::l2_test_error(p, [&](std::span<const double> x) {
        return nn::forward_jet(params, spec, x).value;
    });
    EXPECT_NEAR(a, b, 1e-12 * b);
    EXPECT_NEAR(train::squared_error_field(p, params, spec).mean(), a, 1e-12 * a);
}

TEST(Train, SingleChunkBoundaryCase) {
    auto cfg = small("brinkman", sampling::CriterionKind::Unif, 1000);
    const auto trace = train::train(cfg);
    ASSERT_TRUE(trace.ok());
    EXPECT_LE(trace.resample_epochs.size(), 1u);
    EXPECT_EQ(trace.rows.front().epoch, 0);
    EXPECT_EQ(trace.rows.back().epoch, 1000);
}

TEST(Train, ResamplesAtMultiplesOfThePeriod) {
    auto cfg = small("brinkman", sampling::CriterionKind::Hessian, 3500);
    const auto trace = train::train(cfg);
    EXPECT_EQ(trace.resample_epochs, (std::vector<int>{1000, 2000, 3000}));
    cfg.resample_period = 700;
    EXPECT_EQ(train::train(cfg).resample_epochs, (std::vector<int>{700, 1400, 2100, 2800}));
}

TEST(Train, TraceRowsAreOrdered) {
    auto cfg = small("newton", sampling::CriterionKind::Res, 1250);
    const auto trace = train::train(cfg);
    ASSERT_TRUE(trace.ok());
    std::vector<int> epochs;
    for (const auto& r : trace.rows) epochs.push_back(r.epoch);
    EXPECT_EQ(epochs.front(), 0);
    EXPECT_EQ(epochs.back(), 1250);
    for (std::size_t i = 1; i < trace.rows.size(); ++i) {
        EXPECT_GT(trace.rows[i].epoch, trace.rows[i - 1].epoch);
        EXPECT_LE(trace.rows[i].epoch - trace.rows[i - 1].epoch, 100);
        EXPECT_GE(trace.rows[i].seconds, trace.rows[i - 1].seconds);
        EXPECT_TRUE(std::isfinite(trace.rows[i].train_loss));
    }
    EXPECT_EQ(trace.final_collocation.cols(), cfg.n_collocation);
    EXPECT_THROW(trace.l2_at(150), ConfigError);
    EXPECT_EQ(trace.l2_at(1200), trace.rows[12].l2_test_error);
}

TEST(Train, Reproducible) {
    auto cfg = small("poisson2d", sampling::CriterionKind::Grad, 1100);
    const auto a = train::train(cfg);
    const auto b = train::train(cfg);
    ASSERT_EQ(a.rows.size(), b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        EXPECT_EQ(a.rows[i].train_loss, b.rows[i].train_loss);
        EXPECT_EQ(a.rows[i].l2_test_error, b.rows[i].l2_test_error);
    }
    EXPECT_EQ(a.final_params.values(), b.final_params.values());
    EXPECT_EQ(a.final_collocation, b.final_collocation);
}

TEST(Train, NonFiniteLossStopsWithTheEpoch) {
    auto cfg = small("brinkman", sampling::CriterionKind::Unif, 1000);
    cfg.learning_rate = 1e300;
    const auto trace = train::train(cfg);
    ASSERT_FALSE(trace.ok());
    EXPECT_GE(*trace.failed_epoch, 1);
    EXPECT_FALSE(trace.failure.empty());
    for (const auto& r : trace.rows) {
        EXPECT_TRUE(std::isfinite(r.train_loss));
        EXPECT_LT(r.epoch, *trace.failed_epoch);
    }
}

namespace starrad::sampling {
// Readable parameter values in test names.
void PrintTo(CriterionKind kind, std::ostream* os) { *os << to_string(kind); }
}  // namespace starrad::sampling

class SanityDescent : public ::testing::TestWithParam<std::tuple<std::string, sampling::CriterionKind>> {};

TEST_P(SanityDescent, FinalLossBelowEpoch100) {
    const auto [problem, kind] = GetParam();
    auto cfg = train::preset(problem);
    cfg.criterion = kind;
    cfg.epochs = 2000;
    cfg.seed = 1;
    if (problem == "poisson2d") cfg.pool_size = 8000;
    const auto trace = train::train(cfg);
    ASSERT_TRUE(trace.ok()) << trace.failure;
    double at100 = NAN;
    for (const auto& r : trace.rows)
        if (r.epoch == 100) at100 = r.train_loss;
    EXPECT_LT(trace.rows.back().train_loss, at100);
}

INSTANTIATE_TEST_SUITE_P(
    AllProblems, SanityDescent,
    ::testing::Combine(::testing::Values(std::string("newton"), std::string("brinkman"), std::string("poisson2d")),
                       ::testing::Values(sampling::CriterionKind::Res, sampling::CriterionKind::Grad,
                                         sampling::CriterionKind::Hessian, sampling::CriterionKind::Unif)),
    [](const auto& info) {
        return std::get<0>(info.param) + "_" +
               std::string(sampling::to_string(std::get<1>(info.param)));
    });
