#pragma once

// Residual-driven collocation sampling.
//
// A criterion gamma(x) is computed on a pool of random candidates from the
// squared-residual landscape f = r^2 (res: |f|, grad: |f'|, hessian: |f''|,
// unif: 1). The pool density is
//
//   p(x) ~ gamma(x)^tau / mean(gamma^tau) + c,
//
// and the next collocation set is drawn from it without replacement.

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "starrad/network.hpp"
#include "starrad/pde.hpp"

namespace starrad::sampling {

enum class CriterionKind { Res, Grad, Hessian, Unif };

CriterionKind parse_criterion(std::string_view name);
std::string_view to_string(CriterionKind kind);
std::span<const CriterionKind> all_criteria();

struct DensityParams {
    double tau = 0.5;
    double c = 0.0;
};

struct CandidatePool {
    nn::PointSet points;
    Eigen::VectorXd values;
    Eigen::VectorXd probabilities;

    Eigen::Index size() const noexcept { return points.cols(); }
};

/// Batched scalar field: one value per column of the point set.
using Landscape = std::function<Eigen::VectorXd(const nn::PointSet&)>;

inline constexpr double kRelativeStencilStep = 1e-3;

/// Criterion magnitudes of `landscape` at each candidate. Derivatives are
/// central differences with step kRelativeStencilStep * axis width; where a
/// central stencil would leave the domain the affected axis switches to a
/// one-sided stencil pointing inward. In 2D, grad is the Euclidean norm of the
/// gradient and hessian the Frobenius norm of the diagonal Hessian.
Eigen::VectorXd criterion_values(CriterionKind kind, const Landscape& landscape,
                                 const pde::Box& domain, const nn::PointSet& candidates,
                                 double relative_step = kRelativeStencilStep);

/// Same, with the landscape f(x) = residual(x)^2 of the current network.
Eigen::VectorXd criterion_values(CriterionKind kind, const pde::PdeProblem& problem,
                                 const nn::ParameterVector& params, const nn::NetworkSpec& spec,
                                 const nn::PointSet& candidates);

/// Normalized density over the pool. The unif kind returns exactly 1/n. If
/// every weight is zero the density falls back to uniform with a warning.
Eigen::VectorXd build_density(const Eigen::VectorXd& values, const DensityParams& params,
                              CriterionKind kind);

/// `count` distinct pool indices drawn without replacement with probability
/// proportional to `probabilities` (exponential-key method), in draw order.
std::vector<Eigen::Index> sample_indices(const Eigen::VectorXd& probabilities, Eigen::Index count,
                                         std::uint64_t seed);

nn::PointSet sample_collocation(const CandidatePool& pool, Eigen::Index count, std::uint64_t seed);

/// `count` points uniform in the open box. Deterministic in (seed, event).
nn::PointSet make_candidates(const pde::Box& domain, Eigen::Index count, std::uint64_t seed,
                             std::uint64_t event = 0);

/// Fresh candidates -> criterion -> density, as done at every resampling event.
CandidatePool build_pool(CriterionKind kind, const DensityParams& density,
                         const pde::PdeProblem& problem, const nn::ParameterVector& params,
                         const nn::NetworkSpec& spec, Eigen::Index pool_size, std::uint64_t seed,
                         std::uint64_t event);

}  // namespace starrad::sampling
