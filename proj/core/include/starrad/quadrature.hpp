#pragma once

// Uniform and second-derivative-refined composite trapezoidal quadrature.
//
// The refined rule splits [a,b] into k equal sub-intervals I_j, samples
// M_j = max |f''| on each, and spends n_j ~ N * sqrt(M_j) / sum_p sqrt(M_p)
// of the N trapezoids on I_j. The allocation is then adjusted so that the
// total is exactly N, which makes the comparison with the uniform rule fair.

#include <functional>
#include <span>
#include <vector>

namespace starrad::quad {

using ScalarFunction = std::function<double(double)>;

/// Closed interval [lo, hi] with lo < hi.
class Interval {
public:
    Interval(double lo, double hi);

    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    double width() const noexcept { return hi_ - lo_; }

    /// j-th of `parts` equal sub-intervals; the last one ends exactly at hi().
    Interval part(int j, int parts) const;

    /// i-th of count+1 equidistant nodes; node(0) == lo(), node(count) == hi().
    double node(int i, int count) const;

    friend bool operator==(const Interval&, const Interval&) = default;

private:
    double lo_;
    double hi_;
};

struct AllocationPlan {
    std::vector<double> maxima;  // M_j, sampled max |f''| on I_j
    std::vector<int> counts;     // n_j, trapezoids spent on I_j
    int total = 0;               // N == sum(counts)

    int intervals() const noexcept { return static_cast<int>(counts.size()); }
};

struct RefinedResult {
    double estimate = 0.0;
    AllocationPlan plan;
};

struct ErrorBounds {
    double uniform = 0.0;
    double refined = 0.0;
};

struct QuadratureReport {
    double estimate = 0.0;
    double reference = 0.0;
    double relative_error = 0.0;  // percent
    double bound_uniform = 0.0;
    double bound_refined = 0.0;
};

/// Composite trapezoid rule on `trapezoids` equal-width panels.
/// Throws EvaluationError if f is not finite at a node.
double uniform_trapezoid_integrate(const ScalarFunction& f, const Interval& iv, int trapezoids);

/// M_j = max over `samples` equidistant points of I_j (both ends included) of |fpp|.
std::vector<double> estimate_interval_maxima(const ScalarFunction& fpp, const Interval& iv,
                                             int intervals, int samples = 100);

/// Raw shares n_j = ceil(N sqrt(M_j) / sum sqrt(M_p)) with zeros lifted to one,
/// then one-at-a-time adjustment until sum(n_j) == N: decrement the largest
/// entry while over budget, increment the smallest while under. Ties go to the
/// lowest index. Throws InfeasibleError if there are more intervals than N.
std::vector<int> allocate_and_adjust(std::span<const double> maxima, int total);

/// Refined rule: maxima -> allocation -> n_j uniform trapezoids on each I_j.
RefinedResult refined_trapezoid_integrate(const ScalarFunction& f, const ScalarFunction& fpp,
                                          const Interval& iv, int total, int intervals,
                                          int samples = 100);

/// Upper bounds on the total error of the uniform and refined rules, both
/// computed from the same sampled maxima (the unknown |f''(xi_j)| factors
/// are bounded by M_j). All-zero maxima give (0, 0).
ErrorBounds error_bounds(std::span<const double> maxima, const Interval& iv, int total);

inline constexpr int kReferencePanels = 1'000'000;

/// Composite Simpson estimate on `panels` (even, >= 10^6 by default) panels.
/// This is the reference every relative error in the project is measured against.
double reference_integral(const ScalarFunction& f, const Interval& iv,
                          int panels = kReferencePanels);

/// 100 * |estimate - reference| / |reference|.
double relative_error_percent(double estimate, double reference);

}  // namespace starrad::quad
