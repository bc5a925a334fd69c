#include "starrad/network.hpp"

#include <cmath>
#include <random>
#include <string>

#include "starrad/errors.hpp"

namespace starrad::nn {

namespace {

// Column blocks of a jet matrix: [value | grad_0 .. grad_{d-1} | hess_0 .. hess_{d-1}].
// A value-only trace keeps just the first block (derivative dimension 0).
int channel_count(int dim) { return 1 + 2 * dim; }

Eigen::Index grad_block(int i) { return 1 + i; }
Eigen::Index hess_block(int dim, int i) { return 1 + dim + i; }

struct ActivationDerivatives {
    Eigen::ArrayXXd value, d1, d2, d3;
};

ActivationDerivatives activate(Activation act, const Eigen::ArrayXXd& z) {
    ActivationDerivatives out;
    if (act == Activation::Tanh) {
        out.value = z.tanh();
        const Eigen::ArrayXXd t2 = out.value.square();
        out.d1 = 1.0 - t2;
        out.d2 = -2.0 * out.value * out.d1;
        out.d3 = out.d1 * (6.0 * t2 - 2.0);
    } else {
        out.value = z.max(0.0);
        out.d1 = (z > 0.0).cast<double>();
        out.d2 = Eigen::ArrayXXd::Zero(z.rows(), z.cols());
        out.d3 = Eigen::ArrayXXd::Zero(z.rows(), z.cols());
    }
    return out;
}

Eigen::MatrixXd input_jets(const PointSet& points, int jet_dim) {
    const Eigen::Index n = points.cols();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(points.rows(), channel_count(jet_dim) * n);
    a.leftCols(n) = points;
    for (int i = 0; i < jet_dim; ++i) a.row(i).segment(grad_block(i) * n, n).setOnes();
    return a;
}

void check_points(const NetworkSpec& spec, const PointSet& points) {
    if (points.rows() != spec.input_dim) {
        throw ConfigError("point dimension " + std::to_string(points.rows()) +
                          " does not match network input dimension " +
                          std::to_string(spec.input_dim));
    }
}

void check_params(const ParameterVector& params, const NetworkSpec& spec) {
    if (!params.matches(spec)) throw ConfigError("parameter layout does not match network spec");
}

constexpr Eigen::Index kChunk = 2048;

}  // namespace

Activation parse_activation(std::string_view name) {
    if (name == "tanh") return Activation::Tanh;
    if (name == "relu") return Activation::Relu;
    throw ConfigError("unknown activation '" + std::string(name) + "'; valid: tanh, relu");
}

std::string_view to_string(Activation activation) {
    return activation == Activation::Tanh ? "tanh" : "relu";
}

void NetworkSpec::validate() const {
    if (input_dim != 1 && input_dim != 2) throw ConfigError("input_dim must be 1 or 2");
    if (output_dim != 1) throw ConfigError("output_dim must be 1");
    if (hidden_layers.empty()) throw ConfigError("at least one hidden layer is required");
    for (int w : hidden_layers) {
        if (w < 1) throw ConfigError("hidden layer widths must be positive");
    }
}

int NetworkSpec::fan_in(int layer) const {
    return layer == 0 ? input_dim : hidden_layers.at(static_cast<std::size_t>(layer - 1));
}

int NetworkSpec::fan_out(int layer) const {
    return layer == layer_count() - 1 ? output_dim
                                      : hidden_layers.at(static_cast<std::size_t>(layer));
}

std::size_t NetworkSpec::parameter_count() const {
    std::size_t total = 0;
    for (int l = 0; l < layer_count(); ++l) {
        total += static_cast<std::size_t>(fan_in(l)) * fan_out(l) + fan_out(l);
    }
    return total;
}

ParameterVector::ParameterVector(const NetworkSpec& spec) {
    spec.validate();
    std::size_t offset = 0;
    for (int l = 0; l < spec.layer_count(); ++l) {
        LayerSlice s;
        s.fan_in = spec.fan_in(l);
        s.fan_out = spec.fan_out(l);
        s.weight_offset = offset;
        offset += static_cast<std::size_t>(s.fan_in) * s.fan_out;
        s.bias_offset = offset;
        offset += static_cast<std::size_t>(s.fan_out);
        layout_.push_back(s);
    }
    values_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(offset));
}

Eigen::Map<const Eigen::MatrixXd> ParameterVector::weights(int layer) const {
    const auto& s = slice(layer);
    return {values_.data() + s.weight_offset, s.fan_out, s.fan_in};
}

Eigen::Map<Eigen::MatrixXd> ParameterVector::weights(int layer) {
    const auto& s = slice(layer);
    return {values_.data() + s.weight_offset, s.fan_out, s.fan_in};
}

Eigen::Map<const Eigen::VectorXd> ParameterVector::bias(int layer) const {
    const auto& s = slice(layer);
    return {values_.data() + s.bias_offset, s.fan_out};
}

Eigen::Map<Eigen::VectorXd> ParameterVector::bias(int layer) {
    const auto& s = slice(layer);
    return {values_.data() + s.bias_offset, s.fan_out};
}

bool ParameterVector::matches(const NetworkSpec& spec) const {
    if (layer_count() != spec.layer_count()) return false;
    for (int l = 0; l < layer_count(); ++l) {
        if (slice(l).fan_in != spec.fan_in(l) || slice(l).fan_out != spec.fan_out(l)) return false;
    }
    return true;
}

JetBatch::JetBatch(int input_dim, Eigen::Index count)
    : value(Eigen::RowVectorXd::Zero(count)),
      grad(Eigen::MatrixXd::Zero(input_dim, count)),
      diag_hess(Eigen::MatrixXd::Zero(input_dim, count)) {}

Jet JetBatch::at(Eigen::Index i) const {
    Jet jet;
    jet.value = value(i);
    for (int d = 0; d < input_dim(); ++d) {
        jet.grad.push_back(grad(d, i));
        jet.diag_hess.push_back(diag_hess(d, i));
    }
    return jet;
}

ParameterVector init_network(const NetworkSpec& spec, std::uint64_t seed) {
    ParameterVector params(spec);
    std::mt19937_64 rng(seed);
    for (int l = 0; l < spec.layer_count(); ++l) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(spec.fan_in(l)));
        std::uniform_real_distribution<double> dist(-bound, bound);
        auto w = params.weights(l);
        for (Eigen::Index j = 0; j < w.cols(); ++j) {
            for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = dist(rng);
        }
    }
    return params;
}

JetTrace::JetTrace(const ParameterVector& params, const NetworkSpec& spec, const PointSet& points,
                   bool derivatives)
    : params_(params),
      spec_(spec),
      count_(points.cols()),
      dim_(derivatives ? spec.input_dim : 0),
      derivatives_(derivatives) {
    spec_.validate();
    check_points(spec_, points);
    check_params(params_, spec_);

    const Eigen::Index n = count_;
    const int layers = spec_.layer_count();
    Eigen::MatrixXd a = input_jets(points, dim_);
    for (int l = 0; l < layers; ++l) {
        Eigen::MatrixXd z = params_.weights(l) * a;
        z.leftCols(n).colwise() += params_.bias(l);
        inputs_.push_back(std::move(a));
        if (l == layers - 1) {
            jets_ = JetBatch(spec_.input_dim, n);
            jets_.value = z.row(0).head(n);
            for (int i = 0; i < dim_; ++i) {
                jets_.grad.row(i) = z.row(0).segment(grad_block(i) * n, n);
                jets_.diag_hess.row(i) = z.row(0).segment(hess_block(dim_, i) * n, n);
            }
            preacts_.push_back(std::move(z));
            break;
        }

        auto act = activate(spec_.activation, z.leftCols(n).array());
        Eigen::MatrixXd next(z.rows(), z.cols());
        next.leftCols(n) = act.value.matrix();
        for (int i = 0; i < dim_; ++i) {
            const auto zg = z.middleCols(grad_block(i) * n, n).array();
            const auto zh = z.middleCols(hess_block(dim_, i) * n, n).array();
            next.middleCols(grad_block(i) * n, n) = (act.d1 * zg).matrix();
            next.middleCols(hess_block(dim_, i) * n, n) = (act.d2 * zg.square() + act.d1 * zh).matrix();
        }
        preacts_.push_back(std::move(z));
        d1_.push_back(std::move(act.d1));
        d2_.push_back(std::move(act.d2));
        d3_.push_back(std::move(act.d3));
        a = std::move(next);
    }
}

Eigen::VectorXd JetTrace::backward(const JetBatch& adjoint) const {
    const Eigen::Index n = count_;
    if (adjoint.size() != n || adjoint.input_dim() != spec_.input_dim) {
        throw ConfigError("jet adjoint shape does not match the traced batch");
    }
    Eigen::VectorXd gradient = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(params_.size()));

    // Adjoint of the output-layer pre-activation jets.
    Eigen::MatrixXd zbar(1, channel_count(dim_) * n);
    zbar.row(0).head(n) = adjoint.value;
    for (int i = 0; i < dim_; ++i) {
        zbar.row(0).segment(grad_block(i) * n, n) = adjoint.grad.row(i);
        zbar.row(0).segment(hess_block(dim_, i) * n, n) = adjoint.diag_hess.row(i);
    }

    for (int l = spec_.layer_count() - 1; l >= 0; --l) {
        const auto& s = params_.slice(l);
        Eigen::Map<Eigen::MatrixXd> wbar(gradient.data() + s.weight_offset, s.fan_out, s.fan_in);
        Eigen::Map<Eigen::VectorXd> bbar(gradient.data() + s.bias_offset, s.fan_out);
        wbar.noalias() = zbar * inputs_[static_cast<std::size_t>(l)].transpose();
        bbar = zbar.leftCols(n).rowwise().sum();
        if (l == 0) break;

        const Eigen::MatrixXd abar = params_.weights(l).transpose() * zbar;
        const auto& z = preacts_[static_cast<std::size_t>(l - 1)];
        const auto& d1 = d1_[static_cast<std::size_t>(l - 1)];
        const auto& d2 = d2_[static_cast<std::size_t>(l - 1)];
        const auto& d3 = d3_[static_cast<std::size_t>(l - 1)];

        Eigen::MatrixXd next(abar.rows(), abar.cols());
        Eigen::ArrayXXd value_bar = abar.leftCols(n).array() * d1;
        for (int i = 0; i < dim_; ++i) {
            const auto ag = abar.middleCols(grad_block(i) * n, n).array();
            const auto ah = abar.middleCols(hess_block(dim_, i) * n, n).array();
            const auto zg = z.middleCols(grad_block(i) * n, n).array();
            const auto zh = z.middleCols(hess_block(dim_, i) * n, n).array();
            value_bar += ag * d2 * zg + ah * (d3 * zg.square() + d2 * zh);
            next.middleCols(grad_block(i) * n, n) = (ag * d1 + 2.0 * ah * d2 * zg).matrix();
            next.middleCols(hess_block(dim_, i) * n, n) = (ah * d1).matrix();
        }
        next.leftCols(n) = value_bar.matrix();
        zbar = std::move(next);
    }
    return gradient;
}

Jet forward_jet(const ParameterVector& params, const NetworkSpec& spec, std::span<const double> x) {
    if (static_cast<int>(x.size()) != spec.input_dim) {
        throw ConfigError("point dimension does not match network input dimension");
    }
    PointSet p(spec.input_dim, 1);
    for (int i = 0; i < spec.input_dim; ++i) p(i, 0) = x[static_cast<std::size_t>(i)];
    return forward_jets(params, spec, p).at(0);
}

JetBatch forward_jets(const ParameterVector& params, const NetworkSpec& spec, const PointSet& points) {
    spec.validate();
    check_points(spec, points);
    JetBatch out(spec.input_dim, points.cols());
    for (Eigen::Index start = 0; start < points.cols(); start += kChunk) {
        const Eigen::Index len = std::min(kChunk, points.cols() - start);
        const JetTrace trace(params, spec, points.middleCols(start, len));
        out.value.segment(start, len) = trace.jets().value;
        out.grad.middleCols(start, len) = trace.jets().grad;
        out.diag_hess.middleCols(start, len) = trace.jets().diag_hess;
    }
    return out;
}

Eigen::RowVectorXd forward_values(const ParameterVector& params, const NetworkSpec& spec,
                                  const PointSet& points) {
    spec.validate();
    check_points(spec, points);
    check_params(params, spec);
    Eigen::RowVectorXd out(points.cols());
    const int layers = spec.layer_count();
    for (Eigen::Index start = 0; start < points.cols(); start += kChunk) {
        const Eigen::Index len = std::min(kChunk, points.cols() - start);
        Eigen::MatrixXd a = points.middleCols(start, len);
        for (int l = 0; l < layers; ++l) {
            Eigen::MatrixXd z = params.weights(l) * a;
            z.colwise() += params.bias(l);
            if (l == layers - 1) {
                out.segment(start, len) = z.row(0);
            } else if (spec.activation == Activation::Tanh) {
                a = z.array().tanh().matrix();
            } else {
                a = z.array().max(0.0).matrix();
            }
        }
    }
    return out;
}

}  // namespace starrad::nn
