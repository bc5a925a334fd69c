#include "starrad/integrands.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "starrad/errors.hpp"

namespace starrad::integrands {

namespace {

constexpr std::array<std::string_view, 3> kNames = {"example1", "example2", "sharkfin"};

void require_inside(const quad::Interval& domain, double x, std::string_view name) {
    if (!(x >= domain.lo() && x <= domain.hi())) {
        std::ostringstream os;
        os << name << ": x=" << x << " outside [" << domain.lo() << ", " << domain.hi() << "]";
        throw DomainError(os.str());
    }
}

// (-1.4 + 3x^2) sin(16x) on [0, 2]
double example1(double x) { return (-1.4 + 3.0 * x * x) * std::sin(16.0 * x); }

double example1_pp(double x) {
    const double s = std::sin(16.0 * x);
    const double c = std::cos(16.0 * x);
    return 6.0 * s + 192.0 * x * c - 256.0 * (-1.4 + 3.0 * x * x) * s;
}

// sin(x^{-3/2}) on [0.1, 1]
double example2(double x) { return std::sin(std::pow(x, -1.5)); }

double example2_pp(double x) {
    const double u = std::pow(x, -1.5);
    return -2.25 * std::pow(x, -5.0) * std::sin(u) + 3.75 * std::pow(x, -3.5) * std::cos(u);
}

// Two circular arcs meeting at (1, 1): a "shark fin" on [0, 2].
double sharkfin(double x) {
    if (x < 1.0) {
        const double d = x - 1.1;
        return -0.1 + std::sqrt(1.22 - d * d);
    }
    const double d = x - 2.1;
    return 1.1 - std::sqrt(1.22 - d * d);
}

// The junction x = 1 takes the left arc's curvature.
double sharkfin_pp(double x) {
    if (x <= 1.0) {
        const double d = x - 1.1;
        return -1.22 / std::pow(1.22 - d * d, 1.5);
    }
    const double d = x - 2.1;
    return 1.22 / std::pow(1.22 - d * d, 1.5);
}

BenchFunction make(std::string_view name, quad::Interval domain, double (*value)(double),
                   double (*second)(double)) {
    const std::string label(name);
    return BenchFunction{
        label,
        domain,
        [domain, label, value](double x) {
            require_inside(domain, x, label);
            return value(x);
        },
        [domain, label, second](double x) {
            require_inside(domain, x, label);
            return second(x);
        },
    };
}

const std::array<BenchFunction, 3>& registry() {
    static const std::array<BenchFunction, 3> functions = {
        make(kNames[0], quad::Interval(0.0, 2.0), example1, example1_pp),
        make(kNames[1], quad::Interval(0.1, 1.0), example2, example2_pp),
        make(kNames[2], quad::Interval(0.0, 2.0), sharkfin, sharkfin_pp),
    };
    return functions;
}

}  // namespace

std::span<const std::string_view> bench_names() { return kNames; }

const BenchFunction& bench_function(std::string_view name) {
    for (const auto& fn : registry()) {
        if (fn.name == name) return fn;
    }
    std::string valid;
    for (auto n : kNames) {
        if (!valid.empty()) valid += ", ";
        valid += n;
    }
    throw ConfigError("unknown function '" + std::string(name) + "'; valid names: " + valid);
}

double eval_bench(std::string_view name, double x) { return bench_function(name).value(x); }

double eval_bench_second_derivative(std::string_view name, double x) {
    return bench_function(name).second_derivative(x);
}

double fd_second_derivative(const quad::ScalarFunction& f, double x, double h,
                            const std::optional<quad::Interval>& domain) {
    if (!(h > 0.0)) throw ConfigError("finite-difference step must be positive");
    if (domain && (x - h < domain->lo() || x + h > domain->hi())) {
        std::ostringstream os;
        os << "second-difference stencil [" << x - h << ", " << x + h << "] leaves ["
           << domain->lo() << ", " << domain->hi() << "]";
        throw DomainError(os.str());
    }
    return (f(x - h) - 2.0 * f(x) + f(x + h)) / (h * h);
}

}  // namespace starrad::integrands
