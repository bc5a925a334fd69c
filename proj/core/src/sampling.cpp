#include "starrad/sampling.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "starrad/errors.hpp"

namespace starrad::sampling {

namespace {

constexpr std::array<CriterionKind, 4> kAll = {CriterionKind::Res, CriterionKind::Grad,
                                               CriterionKind::Hessian, CriterionKind::Unif};

enum class Stencil { Central, Forward, Backward };

std::mt19937_64 seeded(std::uint64_t seed, std::uint64_t event, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(event), static_cast<std::uint32_t>(event >> 32),
                      static_cast<std::uint32_t>(stream)};
    return std::mt19937_64(seq);
}

Eigen::VectorXd evaluate(const Landscape& landscape, const nn::PointSet& points) {
    Eigen::VectorXd f = landscape(points);
    if (f.size() != points.cols()) throw ConfigError("landscape returned the wrong number of values");
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        if (!std::isfinite(f(i))) {
            throw EvaluationError("non-finite criterion landscape",
                                  std::vector<double>(points.col(i).data(),
                                                      points.col(i).data() + points.rows()));
        }
    }
    return f;
}

}  // namespace

CriterionKind parse_criterion(std::string_view name) {
    if (name == "res") return CriterionKind::Res;
    if (name == "grad") return CriterionKind::Grad;
    if (name == "hessian") return CriterionKind::Hessian;
    if (name == "unif") return CriterionKind::Unif;
    throw ConfigError("unknown criterion '" + std::string(name) + "'; valid: res, grad, hessian, unif");
}

std::string_view to_string(CriterionKind kind) {
    switch (kind) {
        case CriterionKind::Res: return "res";
        case CriterionKind::Grad: return "grad";
        case CriterionKind::Hessian: return "hessian";
        case CriterionKind::Unif: return "unif";
    }
    return "unknown";
}

std::span<const CriterionKind> all_criteria() { return kAll; }

Eigen::VectorXd criterion_values(CriterionKind kind, const Landscape& landscape,
                                 const pde::Box& domain, const nn::PointSet& candidates,
                                 double relative_step) {
    const Eigen::Index n = candidates.cols();
    if (kind == CriterionKind::Unif) return Eigen::VectorXd::Ones(n);
    if (candidates.rows() != domain.dim()) throw ConfigError("candidate dimension does not match domain");
    if (kind == CriterionKind::Res) return evaluate(landscape, candidates).cwiseAbs();

    const int dim = domain.dim();
    std::vector<double> steps(static_cast<std::size_t>(dim));
    std::vector<Stencil> modes(static_cast<std::size_t>(dim) * static_cast<std::size_t>(n));
    nn::PointSet stencil(dim, n * (1 + 2 * dim));
    stencil.leftCols(n) = candidates;
    for (int i = 0; i < dim; ++i) {
        const auto& axis = domain.axes[static_cast<std::size_t>(i)];
        const double h = relative_step * axis.width();
        steps[static_cast<std::size_t>(i)] = h;
        for (Eigen::Index j = 0; j < n; ++j) {
            const double x = candidates(i, j);
            Stencil mode = Stencil::Central;
            double first = x - h;
            double second = x + h;
            if (x - h < axis.lo()) {
                mode = Stencil::Forward;
                first = x + h;
                second = x + 2.0 * h;
            } else if (x + h > axis.hi()) {
                mode = Stencil::Backward;
                first = x - h;
                second = x - 2.0 * h;
            }
            modes[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)] = mode;
            auto c1 = stencil.col((1 + 2 * i) * n + j);
            auto c2 = stencil.col((2 + 2 * i) * n + j);
            c1 = candidates.col(j);
            c2 = candidates.col(j);
            c1(i) = first;
            c2(i) = second;
        }
    }

    const Eigen::VectorXd f = evaluate(landscape, stencil);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double acc = 0.0;
        const double f0 = f(j);
        for (int i = 0; i < dim; ++i) {
            const double h = steps[static_cast<std::size_t>(i)];
            const double f1 = f((1 + 2 * i) * n + j);
            const double f2 = f((2 + 2 * i) * n + j);
            const Stencil mode = modes[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)];
            double d = 0.0;
            if (kind == CriterionKind::Grad) {
                switch (mode) {
                    case Stencil::Central: d = (f2 - f1) / (2.0 * h); break;
                    case Stencil::Forward: d = (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h); break;
                    case Stencil::Backward: d = (3.0 * f0 - 4.0 * f1 + f2) / (2.0 * h); break;
                }
            } else {
                d = mode == Stencil::Central ? (f1 - 2.0 * f0 + f2) / (h * h)
                                             : (f0 - 2.0 * f1 + f2) / (h * h);
            }
            acc += d * d;
        }
        out(j) = std::sqrt(acc);
    }
    return out;
}

Eigen::VectorXd criterion_values(CriterionKind kind, const pde::PdeProblem& problem,
                                 const nn::ParameterVector& params, const nn::NetworkSpec& spec,
                                 const nn::PointSet& candidates) {
    const Landscape squared_residual = [&](const nn::PointSet& pts) -> Eigen::VectorXd {
        return pde::residuals(problem, params, spec, pts).array().square().matrix();
    };
    return criterion_values(kind, squared_residual, problem.domain, candidates);
}

Eigen::VectorXd build_density(const Eigen::VectorXd& values, const DensityParams& params,
                              CriterionKind kind) {
    const Eigen::Index n = values.size();
    if (n == 0) throw ConfigError("density needs at least one candidate");
    if (!(params.tau >= 0.0) || !(params.c >= 0.0) || !std::isfinite(params.tau) || !std::isfinite(params.c)) {
        throw ConfigError("density parameters tau and c must be finite and non-negative");
    }
    const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    if (kind == CriterionKind::Unif) return uniform;

    Eigen::VectorXd weights(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(values(i) >= 0.0) || !std::isfinite(values(i))) {
            throw EvaluationError("criterion values must be finite and non-negative", {});
        }
        weights(i) = std::pow(values(i), params.tau);
    }
    const double mean = weights.mean();
    if (mean > 0.0) {
        weights /= mean;
    } else {
        weights.setZero();
    }
    weights.array() += params.c;

    // Compensated sum keeps the normalization error independent of pool size.
    double total = 0.0;
    double carry = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double y = weights(i) - carry;
        const double t = total + y;
        carry = (t - total) - y;
        total = t;
    }
    if (!(total > 0.0)) {
        std::clog << "warning: all " << to_string(kind)
                  << " weights are zero; falling back to the uniform density\n";
        return uniform;
    }
    return weights / total;
}

std::vector<Eigen::Index> sample_indices(const Eigen::VectorXd& probabilities, Eigen::Index count,
                                         std::uint64_t seed) {
    const Eigen::Index n = probabilities.size();
    if (count < 0 || count > n) {
        throw ConfigError("cannot draw " + std::to_string(count) + " distinct points from a pool of " +
                          std::to_string(n));
    }
    std::mt19937_64 rng = seeded(seed, 0, 0x5A3D1E);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // Key log(u) / p: the top-`count` keys are a draw without replacement.
    struct Key {
        double key;
        double tie;
        Eigen::Index index;
    };
    std::vector<Key> keys(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        const double p = probabilities(i);
        if (!(p >= 0.0)) throw ConfigError("probabilities must be non-negative");
        double u = unit(rng);
        while (u == 0.0) u = unit(rng);
        const double tie = unit(rng);
        const double key = p > 0.0 ? std::log(u) / p : -std::numeric_limits<double>::infinity();
        keys[static_cast<std::size_t>(i)] = Key{key, tie, i};
    }
    const auto before = [](const Key& a, const Key& b) {
        if (a.key != b.key) return a.key > b.key;
        if (a.tie != b.tie) return a.tie > b.tie;
        return a.index < b.index;
    };
    std::partial_sort(keys.begin(), keys.begin() + count, keys.end(), before);

    std::vector<Eigen::Index> out;
    out.reserve(static_cast<std::size_t>(count));
    for (Eigen::Index i = 0; i < count; ++i) out.push_back(keys[static_cast<std::size_t>(i)].index);
    return out;
}

nn::PointSet sample_collocation(const CandidatePool& pool, Eigen::Index count, std::uint64_t seed) {
    if (pool.probabilities.size() != pool.size()) {
        throw ConfigError("candidate pool points and probabilities differ in length");
    }
    if (count > pool.size()) {
        throw ConfigError("requested " + std::to_string(count) + " collocation points from a pool of " +
                          std::to_string(pool.size()));
    }
    const auto picked = sample_indices(pool.probabilities, count, seed);
    nn::PointSet out(pool.points.rows(), count);
    for (Eigen::Index i = 0; i < count; ++i) {
        out.col(i) = pool.points.col(picked[static_cast<std::size_t>(i)]);
    }
    return out;
}

nn::PointSet make_candidates(const pde::Box& domain, Eigen::Index count, std::uint64_t seed,
                             std::uint64_t event) {
    if (count < 1) throw ConfigError("candidate count must be positive");
    std::mt19937_64 rng = seeded(seed, event, 0xCA9D1D);
    nn::PointSet out(domain.dim(), count);
    for (int i = 0; i < domain.dim(); ++i) {
        const auto& axis = domain.axes[static_cast<std::size_t>(i)];
        std::uniform_real_distribution<double> dist(axis.lo(), axis.hi());
        for (Eigen::Index j = 0; j < count; ++j) {
            double x = dist(rng);
            while (!(x > axis.lo() && x < axis.hi())) x = dist(rng);
            out(i, j) = x;
        }
    }
    return out;
}

CandidatePool build_pool(CriterionKind kind, const DensityParams& density,
                         const pde::PdeProblem& problem, const nn::ParameterVector& params,
                         const nn::NetworkSpec& spec, Eigen::Index pool_size, std::uint64_t seed,
                         std::uint64_t event) {
    CandidatePool pool;
    pool.points = make_candidates(problem.domain, pool_size, seed, event);
    pool.values = criterion_values(kind, problem, params, spec, pool.points);
    pool.probabilities = build_density(pool.values, density, kind);
    return pool;
}

}  // namespace starrad::sampling
