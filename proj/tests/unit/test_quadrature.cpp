#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "starrad/errors.hpp"
#include "starrad/integrands.hpp"
#include "starrad/quadrature.hpp"

using namespace starrad;
using quad::Interval;

TEST(Interval, RejectsEmptyAndReversed) {
    EXPECT_THROW(Interval(1.0, 1.0), ConfigError);
    EXPECT_THROW(Interval(2.0, 1.0), ConfigError);
    EXPECT_THROW(Interval(0.0, INFINITY), ConfigError);
}

TEST(Interval, PartsTileExactly) {
    const Interval iv(0.1, 1.0);
    EXPECT_EQ(iv.part(0, 7).lo(), 0.1);
    EXPECT_EQ(iv.part(6, 7).hi(), 1.0);
    for (int j = 0; j + 1 < 7; ++j) EXPECT_EQ(iv.part(j, 7).hi(), iv.part(j + 1, 7).lo());
}

TEST(UniformTrapezoid, HandSummedSquare) {
    // h = 0.25: h * (0/2 + 1/16 + 4/16 + 9/16 + 1/2)
    EXPECT_DOUBLE_EQ(quad::uniform_trapezoid_integrate([](double x) { return x * x; }, {0, 1}, 4), 0.34375);
}

TEST(UniformTrapezoid, AffineSinglePanelIsExact) {
    EXPECT_DOUBLE_EQ(quad::uniform_trapezoid_integrate([](double x) { return 3 * x + 1; }, {0, 2}, 1), 8.0);
}

TEST(UniformTrapezoid, Example1RelativeError) {
    const auto& f = integrands::bench_function("example1");
    const double ref = quad::reference_integral(f.value, f.domain);
    const double est = quad::uniform_trapezoid_integrate(f.value, f.domain, 25);
    EXPECT_NEAR(quad::relative_error_percent(est, ref), 15.3, 0.2);
}

TEST(UniformTrapezoid, NonFiniteValueReportsNode) {
    try {
        quad::uniform_trapezoid_integrate([](double x) { return 1.0 / (x - 0.5); }, {0, 1}, 2);
        FAIL() << "expected EvaluationError";
    } catch (const EvaluationError& e) {
        ASSERT_EQ(e.location().size(), 1u);
        EXPECT_DOUBLE_EQ(e.location()[0], 0.5);
    }
}

TEST(UniformTrapezoid, RejectsZeroPanels) {
    EXPECT_THROW(quad::uniform_trapezoid_integrate([](double) { return 1.0; }, {0, 1}, 0), ConfigError);
}

TEST(IntervalMaxima, Constant) {
    EXPECT_EQ(quad::estimate_interval_maxima([](double) { return 2.0; }, {0, 1}, 3, 100),
              (std::vector<double>{2, 2, 2}));
}

TEST(IntervalMaxima, RightEndpointsIncluded) {
    const auto m = quad::estimate_interval_maxima([](double x) { return x; }, {0, 2}, 2, 100);
    EXPECT_DOUBLE_EQ(m[0], 1.0);
    EXPECT_DOUBLE_EQ(m[1], 2.0);
}

TEST(IntervalMaxima, Zero) {
    EXPECT_EQ(quad::estimate_interval_maxima([](double) { return 0.0; }, {0, 1}, 2, 100),
              (std::vector<double>{0, 0}));
}

TEST(IntervalMaxima, TakesAbsoluteValue) {
    const auto m = quad::estimate_interval_maxima([](double x) { return -3.0 * x; }, {0, 1}, 1, 2);
    EXPECT_DOUBLE_EQ(m[0], 3.0);
}

TEST(IntervalMaxima, NonFiniteSampleThrows) {
    EXPECT_THROW(quad::estimate_interval_maxima([](double) { return NAN; }, {0, 1}, 2, 10), EvaluationError);
}

TEST(Allocation, SharesAlreadyExact) {
    const std::vector<double> m{1, 4};
    EXPECT_EQ(quad::allocate_and_adjust(m, 9), (std::vector<int>{3, 6}));
}

TEST(Allocation, DecrementsTheMaximum) {
    const std::vector<double> m{1, 1, 4};
    EXPECT_EQ(quad::allocate_and_adjust(m, 10), (std::vector<int>{3, 3, 4}));
}

TEST(Allocation, ZeroIsLiftedToOne) {
    const std::vector<double> m{0, 1};
    EXPECT_EQ(quad::allocate_and_adjust(m, 5), (std::vector<int>{1, 4}));
}

TEST(Allocation, AllZeroDistributesFromTheLeft) {
    const std::vector<double> m{0, 0, 0};
    EXPECT_EQ(quad::allocate_and_adjust(m, 7), (std::vector<int>{3, 2, 2}));
}

TEST(Allocation, TiesGoToLowestIndex) {
    // raw ceil(10 * 1/3) = 4 each, sum 12: decrement index 0, then index 1
    const std::vector<double> m{1, 1, 1};
    EXPECT_EQ(quad::allocate_and_adjust(m, 10), (std::vector<int>{3, 3, 4}));
}

TEST(Allocation, MoreIntervalsThanTrapezoidsIsInfeasible) {
    const std::vector<double> m{1, 1, 1};
    EXPECT_THROW(quad::allocate_and_adjust(m, 2), InfeasibleError);
}

TEST(Allocation, RandomPlansSumToTotal) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0, 1);
    for (int t = 0; t < 2000; ++t) {
        const int n = std::uniform_int_distribution<int>(1, 400)(rng);
        const int k = std::uniform_int_distribution<int>(1, n)(rng);
        std::vector<double> m(static_cast<std::size_t>(k));
        for (auto& v : m) v = u(rng) < 0.2 ? 0.0 : std::exp(10 * u(rng) - 5);
        const auto counts = quad::allocate_and_adjust(m, n);
        ASSERT_EQ(std::accumulate(counts.begin(), counts.end(), 0), n);
        ASSERT_GE(*std::min_element(counts.begin(), counts.end()), 1);
    }
}

TEST(RefinedTrapezoid, Example1) {
    const auto& f = integrands::bench_function("example1");
    const auto r = quad::refined_trapezoid_integrate(f.value, f.second_derivative, f.domain, 25, 11);
    const double ref = quad::reference_integral(f.value, f.domain);
    EXPECT_NEAR(quad::relative_error_percent(r.estimate, ref), 5.47, 1.5);
    EXPECT_EQ(r.plan.total, 25);
    EXPECT_EQ(std::accumulate(r.plan.counts.begin(), r.plan.counts.end(), 0), 25);
}

TEST(RefinedTrapezoid, Example2) {
    const auto& f = integrands::bench_function("example2");
    const auto r = quad::refined_trapezoid_integrate(f.value, f.second_derivative, f.domain, 25, 10);
    const double ref = quad::reference_integral(f.value, f.domain);
    EXPECT_NEAR(quad::relative_error_percent(r.estimate, ref), 1.89, 1.0);
    // Most trapezoids go to the oscillatory left end.
    EXPECT_EQ(r.plan.counts, (std::vector<int>{12, 4, 2, 1, 1, 1, 1, 1, 1, 1}));
}

TEST(RefinedTrapezoid, AffineIsExact) {
    auto f = [](double x) { return -2.0 * x + 0.3; };
    auto fpp = [](double) { return 0.0; };
    for (int n : {3, 10, 57}) {
        const auto r = quad::refined_trapezoid_integrate(f, fpp, {0, 1}, n, 3);
        EXPECT_NEAR(r.estimate, -0.7, 1e-14);
    }
}

TEST(RefinedTrapezoid, PropagatesInfeasibility) {
    auto f = [](double x) { return x; };
    EXPECT_THROW(quad::refined_trapezoid_integrate(f, f, {0, 1}, 3, 4), InfeasibleError);
}

TEST(ErrorBounds, SingleInterval) {
    const std::vector<double> m{2};
    EXPECT_NEAR(quad::error_bounds(m, {0, 1}, 4).uniform, 1.0 / 96.0, 1e-15);
}

TEST(ErrorBounds, ZeroMaxima) {
    const std::vector<double> m{0, 0};
    const auto b = quad::error_bounds(m, {-3, 5}, 17);
    EXPECT_EQ(b.uniform, 0.0);
    EXPECT_EQ(b.refined, 0.0);
}

TEST(ErrorBounds, RefinedBelowUniform) {
    const std::vector<double> m{1, 4};
    const auto b = quad::error_bounds(m, {0, 2}, 9);
    // uniform: 8 / (12 * 81) * 4; refined: (1/12) (1/9 + 4/36)
    EXPECT_NEAR(b.uniform, 32.0 / 972.0, 1e-15);
    EXPECT_NEAR(b.refined, (1.0 / 9.0 + 4.0 / 36.0) / 12.0, 1e-15);
    EXPECT_LE(b.refined, b.uniform);
}

TEST(ReferenceIntegral, ClosedForms) {
    EXPECT_NEAR(quad::reference_integral([](double x) { return x * x; }, {0, 1}), 1.0 / 3.0, 1e-12);
    EXPECT_NEAR(quad::reference_integral([](double x) { return 3 * x + 1; }, {0, 2}), 8.0, 1e-12);
    EXPECT_NEAR(quad::reference_integral([](double x) { return std::sin(x); }, {0, std::numbers::pi}), 2.0, 1e-10);
}

TEST(ReferenceIntegral, NonFiniteThrows) {
    EXPECT_THROW(quad::reference_integral([](double x) { return std::log(x); }, {0, 1}, 1000), EvaluationError);
}

TEST(RelativeError, Definition) {
    EXPECT_DOUBLE_EQ(quad::relative_error_percent(1.1, 1.0), 10.000000000000009);
    EXPECT_DOUBLE_EQ(quad::relative_error_percent(-0.9, -1.0), 9.9999999999999982);
}

TEST(UniformTrapezoid, DoublingPanelsNeverHurts) {
    // Only in the asymptotic range: example2 oscillates too fast below N = 50.
    // Sharkfin is exact to rounding for even N, hence the absolute slack.
    for (auto name : integrands::bench_names()) {
        const auto& f = integrands::bench_function(name);
        const double ref = quad::reference_integral(f.value, f.domain);
        for (int n = 50; n <= 200; ++n) {
            const double e1 = std::abs(quad::uniform_trapezoid_integrate(f.value, f.domain, n) - ref);
            const double e2 = std::abs(quad::uniform_trapezoid_integrate(f.value, f.domain, 2 * n) - ref);
            EXPECT_LE(e2, e1 + 1e-12) << name << " N=" << n;
        }
    }
}

TEST(UniformTrapezoid, SecondOrderOnSmoothIntegrand) {
    const auto& f = integrands::bench_function("example1");
    const double ref = quad::reference_integral(f.value, f.domain);
    for (int n : {50, 100, 200}) {
        const double ratio = std::abs(quad::uniform_trapezoid_integrate(f.value, f.domain, n) - ref) /
                             std::abs(quad::uniform_trapezoid_integrate(f.value, f.domain, 2 * n) - ref);
        EXPECT_NEAR(ratio, 4.0, 0.05) << n;
    }
}

TEST(Quadrature, Deterministic) {
    const auto& f = integrands::bench_function("sharkfin");
    const auto a = quad::refined_trapezoid_integrate(f.value, f.second_derivative, f.domain, 31, 7);
    const auto b = quad::refined_trapezoid_integrate(f.value, f.second_derivative, f.domain, 31, 7);
    EXPECT_EQ(a.estimate, b.estimate);
    EXPECT_EQ(a.plan.counts, b.plan.counts);
    EXPECT_EQ(a.plan.maxima, b.plan.maxima);
}
