#pragma once

#include <Eigen/Core>

namespace starrad::nn {

struct AdamState {
    Eigen::VectorXd first_moment;
    Eigen::VectorXd second_moment;
    long step_count = 0;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    static AdamState fresh(Eigen::Index size, double learning_rate);
};

/// Bias-corrected Adam update of `params` in place; increments step_count.
void adam_step(AdamState& state, Eigen::VectorXd& params, const Eigen::VectorXd& grad);

}  // namespace starrad::nn
