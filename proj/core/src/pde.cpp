#include "starrad/pde.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "starrad/errors.hpp"

namespace starrad::pde {

namespace {

constexpr std::array<std::string_view, 3> kProblems = {"newton", "brinkman", "poisson2d"};

std::map<std::string, double> apply_overrides(std::map<std::string, double> constants,
                                              const std::map<std::string, double>& overrides,
                                              std::string_view problem) {
    for (const auto& [key, value] : overrides) {
        auto it = constants.find(key);
        if (it == constants.end()) {
            std::string valid;
            for (const auto& kv : constants) valid += (valid.empty() ? "" : ", ") + kv.first;
            throw ConfigError("unknown constant '" + key + "' for problem " + std::string(problem) +
                              "; valid: " + valid);
        }
        if (!std::isfinite(value)) throw ConfigError("constant '" + key + "' must be finite");
        it->second = value;
    }
    return constants;
}

double brinkman_rate(const std::map<std::string, double>& c) {
    return std::sqrt(c.at("nu") * c.at("epsilon") / (c.at("nu_e") * c.at("K")));
}

PdeProblem make_newton(std::map<std::string, double> c) {
    const double rate = c.at("R");
    const double t_env = c.at("T_env");
    const double t0 = c.at("T0");
    PdeProblem p;
    p.name = "newton";
    p.kind = ProblemKind::Newton;
    p.domain.axes = {quad::Interval(0.0, c.at("t_max"))};
    // dT/dt - R (T_env - T) = T' + R T - R T_env
    p.op.value_coef = rate;
    p.op.grad_coef = {1.0};
    p.op.hess_coef = {0.0};
    p.op.source = [rate, t_env](std::span<const double>) { return -rate * t_env; };
    p.initial.points = nn::PointSet::Zero(1, 1);
    p.initial.targets = Eigen::VectorXd::Constant(1, t0);
    p.analytic = [rate, t_env, t0](std::span<const double> x) {
        return t_env + (t0 - t_env) * std::exp(-rate * x[0]);
    };
    p.constants = std::move(c);
    return p;
}

PdeProblem make_brinkman(std::map<std::string, double> c) {
    const double nu_e = c.at("nu_e");
    const double nu = c.at("nu");
    const double eps = c.at("epsilon");
    const double perm = c.at("K");
    const double g = c.at("g");
    const double height = c.at("H");
    const double r = brinkman_rate(c);
    PdeProblem p;
    p.name = "brinkman";
    p.kind = ProblemKind::Brinkman;
    p.domain.axes = {quad::Interval(0.0, height)};
    // -(nu_e / eps) u'' + (nu / K) u - g
    p.op.value_coef = nu / perm;
    p.op.grad_coef = {0.0};
    p.op.hess_coef = {-nu_e / eps};
    p.op.source = [g](std::span<const double>) { return -g; };
    p.boundary.points.resize(1, 2);
    p.boundary.points << 0.0, height;
    p.boundary.targets = Eigen::VectorXd::Zero(2);
    p.analytic = [g, perm, nu, r, height](std::span<const double> x) {
        return g * perm / nu * (1.0 - std::cosh(r * (x[0] - height / 2.0)) / std::cosh(r * height / 2.0));
    };
    p.constants = std::move(c);
    return p;
}

double bump(double s, double a) { return std::pow(s, a) * std::pow(1.0 - s, a); }

PdeProblem make_poisson(std::map<std::string, double> c) {
    const double a = c.at("a");
    const double per_side_real = c.at("boundary_per_side");
    if (per_side_real < 1.0 || per_side_real != std::floor(per_side_real)) {
        throw ConfigError("poisson2d: boundary_per_side must be a positive integer");
    }
    const auto per_side = static_cast<Eigen::Index>(per_side_real);

    PdeProblem p;
    p.name = "poisson2d";
    p.kind = ProblemKind::Poisson2d;
    p.domain.axes = {quad::Interval(0.0, 1.0), quad::Interval(0.0, 1.0)};
    // u_xx + u_yy - F(x, y)
    p.op.value_coef = 0.0;
    p.op.grad_coef = {0.0, 0.0};
    p.op.hess_coef = {1.0, 1.0};
    p.op.source = [a](std::span<const double> x) { return -poisson_forcing(x[0], x[1], a); };

    // Walk the perimeter counter-clockwise; every side starts at a corner.
    p.boundary.points.resize(2, 4 * per_side);
    for (Eigen::Index i = 0; i < per_side; ++i) {
        const double s = static_cast<double>(i) / static_cast<double>(per_side);
        p.boundary.points.col(i) << s, 0.0;
        p.boundary.points.col(per_side + i) << 1.0, s;
        p.boundary.points.col(2 * per_side + i) << 1.0 - s, 1.0;
        p.boundary.points.col(3 * per_side + i) << 0.0, 1.0 - s;
    }
    p.boundary.targets = Eigen::VectorXd::Zero(4 * per_side);
    const double scale = std::pow(2.0, 4.0 * a);
    p.analytic = [a, scale](std::span<const double> x) {
        return scale * bump(x[0], a) * bump(x[1], a);
    };
    p.constants = std::move(c);
    return p;
}

}  // namespace

std::span<const std::string_view> problem_names() { return kProblems; }

bool Box::contains(std::span<const double> p) const {
    if (static_cast<int>(p.size()) != dim()) return false;
    for (int i = 0; i < dim(); ++i) {
        const double x = p[static_cast<std::size_t>(i)];
        if (!(x >= axes[static_cast<std::size_t>(i)].lo() && x <= axes[static_cast<std::size_t>(i)].hi())) {
            return false;
        }
    }
    return true;
}

bool Box::contains_interior(std::span<const double> p) const {
    if (static_cast<int>(p.size()) != dim()) return false;
    for (int i = 0; i < dim(); ++i) {
        const double x = p[static_cast<std::size_t>(i)];
        if (!(x > axes[static_cast<std::size_t>(i)].lo() && x < axes[static_cast<std::size_t>(i)].hi())) {
            return false;
        }
    }
    return true;
}

double Box::min_width() const {
    double w = axes.front().width();
    for (const auto& a : axes) w = std::min(w, a.width());
    return w;
}

std::map<std::string, double> default_constants(std::string_view name) {
    if (name == "newton") {
        return {{"R", 0.005}, {"T_env", 25.0}, {"T0", 100.0}, {"t_max", 1000.0}};
    }
    if (name == "brinkman") {
        return {{"nu_e", 1e-3}, {"nu", 1e-3}, {"epsilon", 0.4}, {"K", 1e-3}, {"g", 1.0}, {"H", 1.0}};
    }
    if (name == "poisson2d") {
        return {{"a", 10.0}, {"boundary_per_side", 100.0}};
    }
    throw ConfigError("unknown problem '" + std::string(name) +
                      "'; valid: newton, brinkman, poisson2d");
}

PdeProblem make_problem(std::string_view name, const std::map<std::string, double>& overrides) {
    auto constants = apply_overrides(default_constants(name), overrides, name);
    if (name == "newton") return make_newton(std::move(constants));
    if (name == "brinkman") return make_brinkman(std::move(constants));
    return make_poisson(std::move(constants));
}

void PdeProblem::require_inside(std::span<const double> p) const {
    if (!domain.contains(p)) {
        std::ostringstream os;
        os << name << ": point (";
        for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
        os << ") outside the domain";
        throw DomainError(os.str());
    }
}

double PdeProblem::residual(const nn::Jet& jet, std::span<const double> p) const {
    require_inside(p);
    double r = op.value_coef * jet.value + op.source(p);
    for (int i = 0; i < dim(); ++i) {
        const auto k = static_cast<std::size_t>(i);
        r += op.grad_coef[k] * jet.grad[k] + op.hess_coef[k] * jet.diag_hess[k];
    }
    return r;
}

ad::Var PdeProblem::residual(const ad::TapedJets& jets, Eigen::Index index,
                             std::span<const double> p) const {
    require_inside(p);
    ad::Var r = op.value_coef * jets.value(index) + op.source(p);
    for (int i = 0; i < dim(); ++i) {
        const auto k = static_cast<std::size_t>(i);
        if (op.grad_coef[k] != 0.0) r += op.grad_coef[k] * jets.grad(index, i);
        if (op.hess_coef[k] != 0.0) r += op.hess_coef[k] * jets.diag_hess(index, i);
    }
    return r;
}

double analytic_solution(const PdeProblem& problem, std::span<const double> p) {
    problem.require_inside(p);
    return problem.analytic(p);
}

double poisson_forcing(double x, double y, double a) {
    const auto second = [a](double s) {
        const double t = 1.0 - s;
        return a * std::pow(s, a - 2.0) * std::pow(t, a - 2.0) *
               ((a - 1.0) * t * t - 2.0 * a * s * t + (a - 1.0) * s * s);
    };
    const double scale = std::pow(2.0, 4.0 * a);
    return scale * (second(x) * bump(y, a) + bump(x, a) * second(y));
}

double residual(const PdeProblem& problem, const nn::ParameterVector& params,
                const nn::NetworkSpec& spec, std::span<const double> p) {
    return problem.residual(nn::forward_jet(params, spec, p), p);
}

Eigen::VectorXd residuals(const PdeProblem& problem, const nn::ParameterVector& params,
                          const nn::NetworkSpec& spec, const nn::PointSet& points) {
    const nn::JetBatch jets = nn::forward_jets(params, spec, points);
    Eigen::VectorXd out(points.cols());
    for (Eigen::Index i = 0; i < points.cols(); ++i) {
        const std::span<const double> p(points.col(i).data(), static_cast<std::size_t>(points.rows()));
        problem.require_inside(p);
        double r = problem.op.value_coef * jets.value(i) + problem.op.source(p);
        for (int d = 0; d < problem.dim(); ++d) {
            const auto k = static_cast<std::size_t>(d);
            r += problem.op.grad_coef[k] * jets.grad(d, i) + problem.op.hess_coef[k] * jets.diag_hess(d, i);
        }
        out(i) = r;
    }
    return out;
}

namespace {

void check_loss_inputs(const PdeProblem& problem, const nn::NetworkSpec& spec,
                       const nn::PointSet& collocation, const LossWeights& weights) {
    if (collocation.cols() == 0) throw ConfigError("composite loss needs collocation points");
    if (spec.input_dim != problem.dim()) {
        throw ConfigError("network input dimension does not match problem dimension");
    }
    if (weights.lambda3 != 0.0) {
        throw ConfigError("lambda3 must be 0: no regularizer term is implemented");
    }
    if (!(weights.lambda1 >= 0.0) || !(weights.lambda2 >= 0.0) || !std::isfinite(weights.lambda1) ||
        !std::isfinite(weights.lambda2)) {
        throw ConfigError("loss weights must be finite and non-negative");
    }
}

}  // namespace

double composite_loss(const PdeProblem& problem, const nn::ParameterVector& params,
                      const nn::NetworkSpec& spec, const nn::PointSet& collocation,
                      const LossWeights& weights) {
    check_loss_inputs(problem, spec, collocation, weights);
    const Eigen::VectorXd r = residuals(problem, params, spec, collocation);
    double loss = r.squaredNorm() / static_cast<double>(r.size());
    if (!problem.initial.empty()) {
        const Eigen::RowVectorXd u = nn::forward_values(params, spec, problem.initial.points);
        loss += weights.lambda1 * (u.transpose() - problem.initial.targets).squaredNorm() /
                static_cast<double>(u.size());
    }
    if (!problem.boundary.empty()) {
        const Eigen::RowVectorXd u = nn::forward_values(params, spec, problem.boundary.points);
        loss += weights.lambda2 * (u.transpose() - problem.boundary.targets).squaredNorm() /
                static_cast<double>(u.size());
    }
    return loss;
}

ad::LossGradient composite_loss_gradient(const PdeProblem& problem,
                                         const nn::ParameterVector& params,
                                         const nn::NetworkSpec& spec,
                                         const nn::PointSet& collocation,
                                         const LossWeights& weights) {
    check_loss_inputs(problem, spec, collocation, weights);
    for (Eigen::Index i = 0; i < collocation.cols(); ++i) {
        problem.require_inside({collocation.col(i).data(), static_cast<std::size_t>(collocation.rows())});
    }
    std::vector<ad::BatchRequest> batches{{collocation, true}};
    const bool has_initial = !problem.initial.empty();
    const bool has_boundary = !problem.boundary.empty();
    if (has_initial) batches.push_back({problem.initial.points, false});
    if (has_boundary) batches.push_back({problem.boundary.points, false});

    const auto dirichlet = [](const ad::TapedJets& jets, const Eigen::VectorXd& targets) {
        ad::Var term = ad::Var::constant(0.0);
        for (Eigen::Index i = 0; i < jets.size(); ++i) term += ad::square(jets.value(i) - targets(i));
        return term / static_cast<double>(jets.size());
    };

    return ad::loss_gradient(params, spec, batches, [&](std::span<const ad::TapedJets> jets) {
        const auto& interior_jets = jets[0];
        ad::Var interior = ad::Var::constant(0.0);
        for (Eigen::Index i = 0; i < collocation.cols(); ++i) {
            const std::span<const double> p(collocation.col(i).data(),
                                            static_cast<std::size_t>(collocation.rows()));
            interior += ad::square(problem.residual(interior_jets, i, p));
        }
        ad::Var loss = interior / static_cast<double>(collocation.cols());
        std::size_t next = 1;
        if (has_initial) loss += weights.lambda1 * dirichlet(jets[next++], problem.initial.targets);
        if (has_boundary) loss += weights.lambda2 * dirichlet(jets[next++], problem.boundary.targets);
        return loss;
    });
}

}  // namespace starrad::pde
