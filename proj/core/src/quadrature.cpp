#include "starrad/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "starrad/errors.hpp"

namespace starrad::quad {

namespace {

double checked_eval(const ScalarFunction& f, double x, const char* what) {
    const double y = f(x);
    if (!std::isfinite(y)) {
        throw EvaluationError(std::string("non-finite ") + what, {x});
    }
    return y;
}

}  // namespace

Interval::Interval(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw ConfigError("interval requires finite lo < hi, got [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "]");
    }
}

double Interval::node(int i, int count) const {
    if (i == count) return hi_;
    return lo_ + width() * static_cast<double>(i) / static_cast<double>(count);
}

Interval Interval::part(int j, int parts) const {
    return Interval(node(j, parts), node(j + 1, parts));
}

double uniform_trapezoid_integrate(const ScalarFunction& f, const Interval& iv, int trapezoids) {
    if (trapezoids < 1) {
        throw ConfigError("uniform trapezoid rule needs at least one trapezoid");
    }
    double sum = 0.0;
    double x_prev = iv.lo();
    double y_prev = checked_eval(f, x_prev, "integrand");
    for (int i = 1; i <= trapezoids; ++i) {
        const double x = iv.node(i, trapezoids);
        const double y = checked_eval(f, x, "integrand");
        sum += (x - x_prev) * (y + y_prev) / 2.0;
        x_prev = x;
        y_prev = y;
    }
    return sum;
}

std::vector<double> estimate_interval_maxima(const ScalarFunction& fpp, const Interval& iv,
                                             int intervals, int samples) {
    if (intervals < 1) throw ConfigError("need at least one sub-interval");
    if (samples < 2) throw ConfigError("need at least two samples per sub-interval");

    std::vector<double> maxima(static_cast<std::size_t>(intervals), 0.0);
    for (int j = 0; j < intervals; ++j) {
        const Interval sub = iv.part(j, intervals);
        double m = 0.0;
        for (int s = 0; s < samples; ++s) {
            const double x = sub.node(s, samples - 1);
            m = std::max(m, std::abs(checked_eval(fpp, x, "second derivative")));
        }
        maxima[static_cast<std::size_t>(j)] = m;
    }
    return maxima;
}

std::vector<int> allocate_and_adjust(std::span<const double> maxima, int total) {
    const auto k = static_cast<int>(maxima.size());
    if (k < 1) throw ConfigError("allocation needs at least one sub-interval");
    if (k > total) {
        throw InfeasibleError("cannot allocate " + std::to_string(total) + " trapezoids over " +
                              std::to_string(k) + " sub-intervals");
    }
    for (double m : maxima) {
        if (!(m >= 0.0) || !std::isfinite(m)) throw ConfigError("maxima must be finite and >= 0");
    }

    double root_sum = 0.0;
    for (double m : maxima) root_sum += std::sqrt(m);

    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    if (root_sum > 0.0) {
        for (int j = 0; j < k; ++j) {
            const double share = total * std::sqrt(maxima[static_cast<std::size_t>(j)]) / root_sum;
            counts[static_cast<std::size_t>(j)] = static_cast<int>(std::ceil(share));
        }
    }
    for (int& n : counts) n = std::max(n, 1);

    // max_element/min_element return the first extremum, i.e. the lowest index.
    int sum = std::accumulate(counts.begin(), counts.end(), 0);
    while (sum != total) {
        if (sum > total) {
            --*std::max_element(counts.begin(), counts.end());
            --sum;
        } else {
            ++*std::min_element(counts.begin(), counts.end());
            ++sum;
        }
    }
    return counts;
}

RefinedResult refined_trapezoid_integrate(const ScalarFunction& f, const ScalarFunction& fpp,
                                          const Interval& iv, int total, int intervals,
                                          int samples) {
    if (intervals > total) {
        throw InfeasibleError("refined rule requires k <= N (k=" + std::to_string(intervals) +
                              ", N=" + std::to_string(total) + ")");
    }
    RefinedResult result;
    result.plan.maxima = estimate_interval_maxima(fpp, iv, intervals, samples);
    result.plan.counts = allocate_and_adjust(result.plan.maxima, total);
    result.plan.total = total;

    for (int j = 0; j < intervals; ++j) {
        result.estimate += uniform_trapezoid_integrate(f, iv.part(j, intervals),
                                                       result.plan.counts[static_cast<std::size_t>(j)]);
    }
    return result;
}

ErrorBounds error_bounds(std::span<const double> maxima, const Interval& iv, int total) {
    const auto k = static_cast<int>(maxima.size());
    if (k < 1) throw ConfigError("bounds need at least one sub-interval");
    if (k > total) {
        throw InfeasibleError("bounds require k <= N (k=" + std::to_string(k) +
                              ", N=" + std::to_string(total) + ")");
    }

    const double width = iv.width();
    const double max_m = *std::max_element(maxima.begin(), maxima.end());
    const double n = static_cast<double>(total);

    ErrorBounds bounds;
    bounds.uniform = width * width * width / (12.0 * n * n) * max_m;

    double root_sum = 0.0;
    for (double m : maxima) root_sum += std::sqrt(m);
    if (root_sum == 0.0) return bounds;

    const double l = width / k;
    const double cell = l * l * l / 12.0;
    for (double m : maxima) {
        if (m == 0.0) continue;
        const double share = std::ceil(n * std::sqrt(m) / root_sum);
        bounds.refined += cell * m / (share * share);
    }
    return bounds;
}

double reference_integral(const ScalarFunction& f, const Interval& iv, int panels) {
    if (panels < 2) throw ConfigError("Simpson reference needs at least two panels");
    if (panels % 2 != 0) ++panels;

    const double h = iv.width() / panels;
    double ends = checked_eval(f, iv.lo(), "integrand") + checked_eval(f, iv.hi(), "integrand");
    double odd = 0.0;
    double even = 0.0;
    for (int i = 1; i < panels; ++i) {
        const double y = checked_eval(f, iv.node(i, panels), "integrand");
        if (i % 2 == 1) {
            odd += y;
        } else {
            even += y;
        }
    }
    return h / 3.0 * (ends + 4.0 * odd + 2.0 * even);
}

double relative_error_percent(double estimate, double reference) {
    if (reference == 0.0) {
        return estimate == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return 100.0 * std::abs(estimate - reference) / std::abs(reference);
}

}  // namespace starrad::quad
