#pragma once

// The three benchmark PDE problems and the composite PINN loss
//
//   L = mean_c r(x_c)^2 + lambda1 * mean_i (u(x_i) - T_i)^2 + lambda2 * mean_b (u(x_b) - T_b)^2
//
// All three residuals are linear in the jet of u:
//   r(x) = c_u u + sum_i c_i du/dx_i + sum_i h_i d2u/dx_i^2 + s(x).

#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "starrad/network.hpp"
#include "starrad/quadrature.hpp"
#include "starrad/tape.hpp"

namespace starrad::pde {

enum class ProblemKind { Newton, Brinkman, Poisson2d };

std::span<const std::string_view> problem_names();

/// Axis-aligned box domain.
struct Box {
    std::vector<quad::Interval> axes;

    int dim() const noexcept { return static_cast<int>(axes.size()); }
    bool contains(std::span<const double> p) const;
    bool contains_interior(std::span<const double> p) const;
    /// Width of the narrowest axis.
    double min_width() const;
};

/// Dirichlet-type point constraints u(x_i) = target_i.
struct ConstraintSet {
    nn::PointSet points;
    Eigen::VectorXd targets;

    Eigen::Index size() const noexcept { return points.cols(); }
    bool empty() const noexcept { return points.cols() == 0; }
};

struct LinearOperator {
    double value_coef = 0.0;
    std::vector<double> grad_coef;
    std::vector<double> hess_coef;
    std::function<double(std::span<const double>)> source;
};

struct LossWeights {
    double lambda1 = 1.0;  // initial operator
    double lambda2 = 1.0;  // boundary operator
    double lambda3 = 0.0;  // regularizer; no regularizer is implemented, must stay 0
};

class PdeProblem {
public:
    std::string name;
    ProblemKind kind = ProblemKind::Newton;
    Box domain;
    std::map<std::string, double> constants;
    LinearOperator op;
    ConstraintSet initial;
    ConstraintSet boundary;
    std::function<double(std::span<const double>)> analytic;

    int dim() const noexcept { return domain.dim(); }

    /// Residual for a given jet of u at p. Throws DomainError outside the domain.
    double residual(const nn::Jet& jet, std::span<const double> p) const;

    /// Same residual, recorded on the tape for point `index` of `jets`.
    ad::Var residual(const ad::TapedJets& jets, Eigen::Index index, std::span<const double> p) const;

    void require_inside(std::span<const double> p) const;
};

/// Builds "newton", "brinkman" or "poisson2d" with default constants, then
/// applies `overrides`. Unknown names or constant keys throw ConfigError.
PdeProblem make_problem(std::string_view name, const std::map<std::string, double>& overrides = {});

/// Default constants for a problem, e.g. {"R", 0.005}, {"T_env", 25}, ...
std::map<std::string, double> default_constants(std::string_view name);

double analytic_solution(const PdeProblem& problem, std::span<const double> p);

/// Laplacian of 2^{4a} x^a (1-x)^a y^a (1-y)^a.
double poisson_forcing(double x, double y, double a = 10.0);

/// Residual of the network u_theta at one point.
double residual(const PdeProblem& problem, const nn::ParameterVector& params,
                const nn::NetworkSpec& spec, std::span<const double> p);

/// Residuals at every column of `points`.
Eigen::VectorXd residuals(const PdeProblem& problem, const nn::ParameterVector& params,
                          const nn::NetworkSpec& spec, const nn::PointSet& points);

double composite_loss(const PdeProblem& problem, const nn::ParameterVector& params,
                      const nn::NetworkSpec& spec, const nn::PointSet& collocation,
                      const LossWeights& weights = {});

/// composite_loss together with its exact parameter gradient.
ad::LossGradient composite_loss_gradient(const PdeProblem& problem,
                                         const nn::ParameterVector& params,
                                         const nn::NetworkSpec& spec,
                                         const nn::PointSet& collocation,
                                         const LossWeights& weights = {});

}  // namespace starrad::pde
