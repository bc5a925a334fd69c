#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "starrad/errors.hpp"
#include "starrad/integrands.hpp"

using namespace starrad;
using namespace starrad::integrands;

TEST(BenchFunctions, Names) {
    ASSERT_EQ(bench_names().size(), 3u);
    EXPECT_EQ(bench_names()[0], "example1");
    EXPECT_EQ(bench_names()[1], "example2");
    EXPECT_EQ(bench_names()[2], "sharkfin");
}

TEST(BenchFunctions, Domains) {
    EXPECT_EQ(bench_function("example1").domain, quad::Interval(0, 2));
    EXPECT_EQ(bench_function("example2").domain, quad::Interval(0.1, 1));
    EXPECT_EQ(bench_function("sharkfin").domain, quad::Interval(0, 2));
}

TEST(BenchFunctions, PointValues) {
    EXPECT_EQ(eval_bench("example1", 0.0), 0.0);
    EXPECT_NEAR(eval_bench("sharkfin", 1.0), 1.0, 1e-12);
    EXPECT_NEAR(eval_bench("example2", 1.0), 0.841471, 1e-6);
}

TEST(BenchFunctions, SharkfinIsContinuousAtTheJunction) {
    const double left = -0.1 + std::sqrt(1.22 - (1.0 - 1.1) * (1.0 - 1.1));
    EXPECT_NEAR(left, 1.0, 1e-12);
    EXPECT_NEAR(eval_bench("sharkfin", 1.0), left, 1e-12);
    EXPECT_NEAR(eval_bench("sharkfin", std::nextafter(1.0, 0.0)), 1.0, 1e-12);
}

TEST(BenchFunctions, SharkfinJunctionUsesLeftBranchCurvature) {
    const double left = eval_bench_second_derivative("sharkfin", std::nextafter(1.0, 0.0));
    EXPECT_NEAR(eval_bench_second_derivative("sharkfin", 1.0), left, 1e-9);
    EXPECT_LT(left, 0.0);
}

TEST(BenchFunctions, OutsideDomainThrows) {
    EXPECT_THROW(eval_bench("example1", -0.01), DomainError);
    EXPECT_THROW(eval_bench("example2", 0.05), DomainError);
    EXPECT_THROW(eval_bench_second_derivative("sharkfin", 2.5), DomainError);
}

TEST(BenchFunctions, UnknownNameListsValidOnes) {
    try {
        bench_function("example4");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("sharkfin"), std::string::npos);
    }
}

TEST(BenchFunctions, ClosedFormSecondDerivativesMatchFiniteDifferences) {
    // example2 near 0.1 has a fourth derivative near 1e10, so a fine step is needed.
    std::mt19937_64 rng(3);
    for (auto name : bench_names()) {
        const auto& f = bench_function(name);
        std::uniform_real_distribution<double> u(f.domain.lo() + 1e-3, f.domain.hi() - 1e-3);
        for (int i = 0; i < 100; ++i) {
            const double x = u(rng);
            if (name == "sharkfin" && std::abs(x - 1.0) < 1e-3) continue;  // kink
            const double exact = f.second_derivative(x);
            const double fd = fd_second_derivative(f.value, x, 1e-5, f.domain);
            EXPECT_NEAR(fd, exact, 1e-4 * std::max(1.0, std::abs(exact))) << name << " x=" << x;
        }
    }
}

TEST(FiniteDifference, Square) {
    EXPECT_NEAR(fd_second_derivative([](double x) { return x * x; }, 0.5, 1e-4), 2.0, 1e-5);
}

TEST(FiniteDifference, Affine) {
    EXPECT_NEAR(fd_second_derivative([](double x) { return 7 * x - 2; }, 3.3, 1e-4), 0.0, 1e-6);
}

TEST(FiniteDifference, SineAtZero) {
    EXPECT_NEAR(fd_second_derivative([](double x) { return std::sin(x); }, 0.0, 1e-4), 0.0, 1e-6);
}

TEST(FiniteDifference, StencilLeavingDomainThrows) {
    EXPECT_THROW(fd_second_derivative([](double x) { return x; }, 0.0, 1e-4, quad::Interval(0, 1)), DomainError);
    EXPECT_THROW(fd_second_derivative([](double x) { return x; }, 0.5, 0.0), ConfigError);
}
