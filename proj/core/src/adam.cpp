#include "starrad/adam.hpp"

#include <cmath>

#include "starrad/errors.hpp"

namespace starrad::nn {

AdamState AdamState::fresh(Eigen::Index size, double learning_rate) {
    if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
    AdamState s;
    s.first_moment = Eigen::VectorXd::Zero(size);
    s.second_moment = Eigen::VectorXd::Zero(size);
    s.learning_rate = learning_rate;
    return s;
}

void adam_step(AdamState& state, Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
    if (params.size() != grad.size() || state.first_moment.size() != params.size() ||
        state.second_moment.size() != params.size()) {
        throw ConfigError("adam: parameter, gradient and moment shapes differ");
    }
    ++state.step_count;
    state.first_moment = state.beta1 * state.first_moment + (1.0 - state.beta1) * grad;
    state.second_moment =
        state.beta2 * state.second_moment + (1.0 - state.beta2) * grad.cwiseProduct(grad);

    const double t = static_cast<double>(state.step_count);
    const double c1 = 1.0 - std::pow(state.beta1, t);
    const double c2 = 1.0 - std::pow(state.beta2, t);
    params.array() -= state.learning_rate * (state.first_moment.array() / c1) /
                      ((state.second_moment.array() / c2).sqrt() + state.epsilon);
}

}  // namespace starrad::nn
