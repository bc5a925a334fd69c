#include "starrad/cli/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "starrad/cli/experiments.hpp"
#include "starrad/errors.hpp"
#include "starrad/network.hpp"
#include "starrad/sampling.hpp"
#include "starrad/tape.hpp"

namespace starrad::cli {

namespace {

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(4);
    s << v;
    return s.str();
}

CheckResult result(std::string name, bool passed, const std::string& measured) {
    return {std::move(name), passed, measured};
}

// Fourth-order central differences.
double d1(const std::function<double(double)>& f, double x, double h) {
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

double d2(const std::function<double(double)>& f, double x, double h) {
    return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h);
}

nn::NetworkSpec random_spec(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> dim(1, 2), depth(1, 3), width(3, 12);
    nn::NetworkSpec spec;
    spec.input_dim = dim(rng);
    spec.activation = nn::Activation::Tanh;
    const int layers = depth(rng);
    for (int l = 0; l < layers; ++l) spec.hidden_layers.push_back(width(rng));
    return spec;
}

nn::ParameterVector random_params(const nn::NetworkSpec& spec, std::mt19937_64& rng) {
    auto params = nn::init_network(spec, rng());
    std::uniform_real_distribution<double> bias(-0.5, 0.5), stretch(0.5, 2.0);
    for (int l = 0; l < params.layer_count(); ++l) {
        params.weights(l) *= stretch(rng);
        for (Eigen::Index i = 0; i < params.bias(l).size(); ++i) params.bias(l)(i) = bias(rng);
    }
    return params;
}

nn::PointSet random_points(int dim, Eigen::Index count, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    nn::PointSet p(dim, count);
    for (Eigen::Index j = 0; j < count; ++j)
        for (int i = 0; i < dim; ++i) p(i, j) = u(rng);
    return p;
}

// Mean of (u + 0.5 sum u_i + 0.25 sum u_ii - target)^2; templated so the same
// expression runs on the tape and in plain doubles.
template <class T, class Jets>
T probe_loss(const Jets& jets, Eigen::Index count, int dim, const Eigen::VectorXd& target, T zero) {
    T sum = zero;
    for (Eigen::Index i = 0; i < count; ++i) {
        T r = jets.value(i) - target(i);
        for (int a = 0; a < dim; ++a) r = r + 0.5 * jets.grad(i, a) + 0.25 * jets.diag_hess(i, a);
        sum = sum + r * r;
    }
    return sum / static_cast<double>(count);
}

struct PlainJets {
    const nn::JetBatch& batch;
    double value(Eigen::Index i) const { return batch.value(i); }
    double grad(Eigen::Index i, int a) const { return batch.grad(a, i); }
    double diag_hess(Eigen::Index i, int a) const { return batch.diag_hess(a, i); }
};

}  // namespace

CheckResult check_quadrature_golden(std::string_view function, int n, int k, double uniform_pct,
                                    double uniform_tol, double refined_pct, double refined_tol) {
    const auto c = run_quadrature_case(function, n, k);
    const bool ok = std::abs(c.uniform_error - uniform_pct) <= uniform_tol &&
                    std::abs(c.refined_error - refined_pct) <= refined_tol;
    return result("quadrature " + std::string(function) + " N=" + std::to_string(n) + " k=" + std::to_string(k), ok,
                  "uniform " + fmt(c.uniform_error) + "% (want " + fmt(uniform_pct) + " +- " + fmt(uniform_tol) +
                      "), refined " + fmt(c.refined_error) + "% (want " + fmt(refined_pct) + " +- " +
                      fmt(refined_tol) + ")");
}

CheckResult check_allocation_sums(const VerifyOptions& options) {
    std::mt19937_64 rng(options.seed);
    std::uniform_int_distribution<int> pick_n(1, 300);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int failures = 0;
    const int trials = options.random_functions;
    for (int t = 0; t < trials; ++t) {
        const int n = pick_n(rng);
        const int k = std::uniform_int_distribution<int>(1, n)(rng);
        std::vector<double> maxima(static_cast<std::size_t>(k));
        for (auto& m : maxima) {
            const double r = u(rng);
            m = r < 0.1 ? 0.0 : r < 0.2 ? 1.0 : std::pow(10.0, 6.0 * u(rng) - 3.0);
        }
        const auto counts = options.allocate(maxima, n);
        const bool ok = static_cast<int>(counts.size()) == k &&
                        std::accumulate(counts.begin(), counts.end(), 0) == n &&
                        std::all_of(counts.begin(), counts.end(), [](int c) { return c >= 1; });
        if (!ok) ++failures;
    }
    return result("allocation sums to N", failures == 0,
                  std::to_string(trials - failures) + "/" + std::to_string(trials) + " plans exact");
}

CheckResult check_bound_dominance(const VerifyOptions& options) {
    std::mt19937_64 rng(options.seed + 1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int holds = 0;
    double worst = 0.0;  // max of B_refined / B_uniform
    const int trials = options.random_functions;
    for (int t = 0; t < trials; ++t) {
        const int terms = std::uniform_int_distribution<int>(1, 6)(rng);
        std::vector<double> amp, freq, phase;
        for (int m = 0; m < terms; ++m) {
            amp.push_back(2.0 * u(rng) - 1.0);
            freq.push_back(0.5 + 30.0 * u(rng));
            phase.push_back(2.0 * std::numbers::pi * u(rng));
        }
        auto fpp = [&](double x) {
            double s = 0.0;
            for (int m = 0; m < terms; ++m) s -= amp[m] * freq[m] * freq[m] * std::sin(freq[m] * x + phase[m]);
            return s;
        };
        const double lo = 4.0 * u(rng) - 2.0;
        const quad::Interval iv(lo, lo + 0.5 + 3.5 * u(rng));
        const int n = std::uniform_int_distribution<int>(1, 200)(rng);
        const int k = std::uniform_int_distribution<int>(1, std::min(n, 50))(rng);
        const auto maxima = quad::estimate_interval_maxima(fpp, iv, k);
        const auto b = options.bounds(maxima, iv, n);
        // k == 1 makes both bounds the same number computed two ways.
        if (b.refined <= b.uniform * (1.0 + 1e-12)) ++holds;
        if (b.uniform > 0.0) worst = std::max(worst, b.refined / b.uniform);
    }
    return result("refined bound <= uniform bound", holds == trials,
                  std::to_string(holds) + "/" + std::to_string(trials) + " hold, worst ratio " + fmt(worst));
}

CheckResult check_jet_derivatives(const VerifyOptions& options) {
    std::mt19937_64 rng(options.seed + 2);
    double worst_grad = 0.0, worst_hess = 0.0;
    for (int t = 0; t < options.random_networks; ++t) {
        const auto spec = random_spec(rng);
        const auto params = random_params(spec, rng);
        const auto points = random_points(spec.input_dim, 5, rng);
        const auto jets = nn::forward_jets(params, spec, points);
        for (Eigen::Index j = 0; j < points.cols(); ++j) {
            for (int a = 0; a < spec.input_dim; ++a) {
                auto along = [&](double s) {
                    nn::PointSet q = points.col(j);
                    q(a, 0) = s;
                    return nn::forward_values(params, spec, q)(0);
                };
                const double x = points(a, j), h = 2e-3;
                const double g = d1(along, x, h), hh = d2(along, x, h);
                const double gscale = std::max(jets.grad.col(j).cwiseAbs().maxCoeff(), 1e-3);
                const double hscale = std::max(jets.diag_hess.col(j).cwiseAbs().maxCoeff(), 1e-3);
                worst_grad = std::max(worst_grad, std::abs(jets.grad(a, j) - g) / gscale);
                worst_hess = std::max(worst_hess, std::abs(jets.diag_hess(a, j) - hh) / hscale);
            }
        }
    }
    const bool ok = worst_grad <= 1e-5 && worst_hess <= 1e-5;
    return result("jet vs finite differences", ok,
                  "worst relative error: first " + fmt(worst_grad) + ", second " + fmt(worst_hess) +
                      " (limit 1e-05) over " + std::to_string(options.random_networks) + " networks");
}

CheckResult check_parameter_gradients(const VerifyOptions& options) {
    std::mt19937_64 rng(options.seed + 3);
    double worst = 0.0;
    for (int t = 0; t < options.random_networks; ++t) {
        const auto spec = random_spec(rng);
        auto params = random_params(spec, rng);
        const auto points = random_points(spec.input_dim, 6, rng);
        Eigen::VectorXd target(points.cols());
        for (Eigen::Index i = 0; i < target.size(); ++i) target(i) = std::sin(points.col(i).sum());
        const int dim = spec.input_dim;
        const auto count = points.cols();

        const auto taped = ad::loss_gradient(params, spec, points, [&](const ad::TapedJets& jets) {
            return probe_loss(jets, count, dim, target, ad::Var::constant(0.0));
        });
        auto plain = [&](const nn::ParameterVector& p) {
            const auto batch = nn::forward_jets(p, spec, points);
            return probe_loss(PlainJets{batch}, count, dim, target, 0.0);
        };

        Eigen::VectorXd fd(taped.gradient.size());
        for (Eigen::Index i = 0; i < fd.size(); ++i) {
            const double saved = params.values()(i);
            auto shifted = [&](double v) {
                params.values()(i) = v;
                return plain(params);
            };
            fd(i) = d1(shifted, saved, 1e-3);
            params.values()(i) = saved;
        }
        const double scale = std::max(fd.cwiseAbs().maxCoeff(), 1e-12);
        worst = std::max(worst, (taped.gradient - fd).cwiseAbs().maxCoeff() / scale);
    }
    return result("parameter gradient vs finite differences", worst <= 1e-4,
                  "worst relative error " + fmt(worst) + " (limit 1e-04) over " +
                      std::to_string(options.random_networks) + " networks");
}

CheckResult check_density_normalization(const VerifyOptions& options) {
    std::mt19937_64 rng(options.seed + 4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_sum = 0.0, worst_scale = 0.0;
    bool negative = false;
    for (int t = 0; t < 200; ++t) {
        Eigen::VectorXd values(std::uniform_int_distribution<int>(1, 500)(rng));
        for (auto& v : values) v = u(rng) < 0.1 ? 0.0 : std::pow(10.0, 4.0 * u(rng) - 2.0);
        const sampling::DensityParams params{0.25 + 2.0 * u(rng), u(rng) < 0.5 ? 0.0 : u(rng)};
        for (auto kind : sampling::all_criteria()) {
            const auto p = sampling::build_density(values, params, kind);
            worst_sum = std::max(worst_sum, std::abs(p.sum() - 1.0));
            negative = negative || (p.array() < 0.0).any();
            if (params.c == 0.0) {
                const auto q = sampling::build_density(values * (0.01 + 100.0 * u(rng)), params, kind);
                worst_scale = std::max(worst_scale, (p - q).cwiseAbs().maxCoeff());
            }
        }
    }
    const bool ok = worst_sum <= 1e-12 && worst_scale <= 1e-12 && !negative;
    return result("density normalization", ok,
                  "max |sum - 1| " + fmt(worst_sum) + ", max scale drift " + fmt(worst_scale) +
                      (negative ? ", negative entries" : ""));
}

CheckResult check_affine_exactness(const VerifyOptions& options) {
    std::mt19937_64 rng(options.seed + 5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
        const double alpha = 10.0 * u(rng), beta = 10.0 * u(rng);
        const double lo = 5.0 * u(rng);
        const double hi = lo + 0.1 + 5.0 * (u(rng) + 1.0);
        const quad::Interval iv(lo, hi);
        auto f = [=](double x) { return alpha * x + beta; };
        auto fpp = [](double) { return 0.0; };
        const double exact = 0.5 * alpha * (hi * hi - lo * lo) + beta * (hi - lo);
        const double scale = std::max(std::abs(exact), (std::abs(alpha) * std::max(std::abs(lo), std::abs(hi)) +
                                                         std::abs(beta)) * (hi - lo));
        const int n = std::uniform_int_distribution<int>(1, 200)(rng);
        const int k = std::uniform_int_distribution<int>(1, n)(rng);
        const double a = quad::uniform_trapezoid_integrate(f, iv, n);
        const double b = quad::refined_trapezoid_integrate(f, fpp, iv, n, k).estimate;
        worst = std::max({worst, std::abs(a - exact) / scale, std::abs(b - exact) / scale});
    }
    return result("trapezoid rules exact on affine integrands", worst <= 1e-10,
                  "worst relative error " + fmt(worst) + " (limit 1e-10)");
}

nn::Jet analytic_jet(const pde::PdeProblem& problem, std::span<const double> p) {
    nn::Jet jet;
    std::vector<double> x(p.begin(), p.end());
    jet.value = problem.analytic(x);
    for (int a = 0; a < problem.dim(); ++a) {
        const double h = 1e-3 * problem.domain.axes[static_cast<std::size_t>(a)].width();
        auto along = [&](double s) {
            auto q = x;
            q[static_cast<std::size_t>(a)] = s;
            return problem.analytic(q);
        };
        jet.grad.push_back(d1(along, x[static_cast<std::size_t>(a)], h));
        jet.diag_hess.push_back(d2(along, x[static_cast<std::size_t>(a)], h));
    }
    return jet;
}

CheckResult check_analytic_residuals(const VerifyOptions& options) {
    double worst = 0.0;
    std::string detail;
    for (auto name : pde::problem_names()) {
        const auto problem = pde::make_problem(name);
        // Keep the five-point stencils inside the domain.
        pde::Box inner = problem.domain;
        for (auto& axis : inner.axes) {
            const double margin = 2.5e-3 * axis.width();
            axis = quad::Interval(axis.lo() + margin, axis.hi() - margin);
        }
        const auto points = sampling::make_candidates(inner, options.residual_points, options.seed + 6);
        double local = 0.0;
        for (Eigen::Index j = 0; j < points.cols(); ++j) {
            std::span<const double> p(points.col(j).data(), static_cast<std::size_t>(points.rows()));
            local = std::max(local, std::abs(problem.residual(analytic_jet(problem, p), p)));
        }
        worst = std::max(worst, local);
        detail += (detail.empty() ? "" : ", ") + std::string(name) + " " + fmt(local);
    }
    return result("analytic solutions annihilate residuals", worst <= 1e-4,
                  "max |r|: " + detail + " (limit 1e-04)");
}

std::vector<CheckResult> run_verify(const VerifyOptions& options) {
    return {
        check_quadrature_golden("example1", 25, 11, 15.3, 0.2, 5.47, 1.5),
        check_quadrature_golden("example2", 25, 10, 16.4, 0.2, 1.89, 1.0),
        check_quadrature_golden("sharkfin", 25, 10, 0.59, 0.05, 0.049, 0.05),
        check_allocation_sums(options),
        check_bound_dominance(options),
        check_jet_derivatives(options),
        check_parameter_gradients(options),
        check_density_normalization(options),
        check_affine_exactness(options),
        check_analytic_residuals(options),
    };
}

int report_checks(std::ostream& out, const std::vector<CheckResult>& checks) {
    int failed = 0;
    for (const auto& c : checks) {
        out << (c.passed ? "PASS  " : "FAIL  ") << c.name << ": " << c.measured << '\n';
        if (!c.passed) ++failed;
    }
    out << (checks.size() - static_cast<std::size_t>(failed)) << "/" << checks.size() << " checks passed\n";
    return failed == 0 ? 0 : 1;
}

}  // namespace starrad::cli
