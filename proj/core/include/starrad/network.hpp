#pragma once

// Fully-connected networks evaluated as second-order Taylor jets.
//
// A jet carries, for every input coordinate x_i, the value u, the first
// derivative du/dx_i and the diagonal second derivative d2u/dx_i^2. Every
// channel is propagated exactly through the affine layers and activations,
// and the forward pass keeps what reverse accumulation needs to turn a jet
// adjoint into a parameter gradient.

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace starrad::nn {

enum class Activation { Tanh, Relu };

Activation parse_activation(std::string_view name);
std::string_view to_string(Activation activation);

struct NetworkSpec {
    int input_dim = 1;
    std::vector<int> hidden_layers;
    Activation activation = Activation::Tanh;
    int output_dim = 1;

    /// Throws ConfigError unless input_dim in {1, 2}, output_dim == 1 and
    /// every hidden width is positive.
    void validate() const;

    /// Number of affine layers, hidden plus output.
    int layer_count() const noexcept { return static_cast<int>(hidden_layers.size()) + 1; }
    int fan_in(int layer) const;
    int fan_out(int layer) const;

    /// sum over layers of fan_in * fan_out + fan_out.
    std::size_t parameter_count() const;
};

struct LayerSlice {
    std::size_t weight_offset = 0;  // column-major fan_out x fan_in block
    std::size_t bias_offset = 0;
    int fan_in = 0;
    int fan_out = 0;
};

/// Flat parameter storage with per-layer views.
class ParameterVector {
public:
    ParameterVector() = default;
    explicit ParameterVector(const NetworkSpec& spec);  // zero-filled

    std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }
    int layer_count() const noexcept { return static_cast<int>(layout_.size()); }
    const LayerSlice& slice(int layer) const { return layout_.at(static_cast<std::size_t>(layer)); }

    Eigen::Map<const Eigen::MatrixXd> weights(int layer) const;
    Eigen::Map<Eigen::MatrixXd> weights(int layer);
    Eigen::Map<const Eigen::VectorXd> bias(int layer) const;
    Eigen::Map<Eigen::VectorXd> bias(int layer);

    const Eigen::VectorXd& values() const noexcept { return values_; }
    Eigen::VectorXd& values() noexcept { return values_; }

    bool matches(const NetworkSpec& spec) const;

private:
    Eigen::VectorXd values_;
    std::vector<LayerSlice> layout_;
};

/// Points are stored column-wise: input_dim x count.
using PointSet = Eigen::MatrixXd;

struct Jet {
    double value = 0.0;
    std::vector<double> grad;       // du/dx_i
    std::vector<double> diag_hess;  // d2u/dx_i^2
};

/// Jets of a batch of points, one column per point.
struct JetBatch {
    Eigen::RowVectorXd value;
    Eigen::MatrixXd grad;       // input_dim x count
    Eigen::MatrixXd diag_hess;  // input_dim x count

    JetBatch() = default;
    JetBatch(int input_dim, Eigen::Index count);

    Eigen::Index size() const noexcept { return value.size(); }
    int input_dim() const noexcept { return static_cast<int>(grad.rows()); }
    Jet at(Eigen::Index i) const;
};

/// Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)), biases zero. Deterministic in seed.
ParameterVector init_network(const NetworkSpec& spec, std::uint64_t seed);

Jet forward_jet(const ParameterVector& params, const NetworkSpec& spec, std::span<const double> x);
JetBatch forward_jets(const ParameterVector& params, const NetworkSpec& spec, const PointSet& points);

/// Plain network outputs, no derivative channels.
Eigen::RowVectorXd forward_values(const ParameterVector& params, const NetworkSpec& spec,
                                  const PointSet& points);

/// One forward jet pass with its activations retained for reverse accumulation.
/// With `derivatives == false` only the value channel is propagated; the
/// grad and diag_hess rows of jets() are then zero and ignored by backward().
class JetTrace {
public:
    JetTrace(const ParameterVector& params, const NetworkSpec& spec, const PointSet& points,
             bool derivatives = true);

    bool has_derivatives() const noexcept { return derivatives_; }

    const JetBatch& jets() const noexcept { return jets_; }

    /// Gradient with respect to every parameter of sum_p <adjoint_p, jet_p>,
    /// i.e. the chain rule through all value/grad/diag_hess channels.
    Eigen::VectorXd backward(const JetBatch& adjoint) const;

private:
    ParameterVector params_;
    NetworkSpec spec_;
    Eigen::Index count_;
    int dim_;
    bool derivatives_;
    JetBatch jets_;
    // Per affine layer: its input jets and, for hidden layers, pre-activation
    // jets plus sigma', sigma'', sigma''' at the pre-activation values.
    std::vector<Eigen::MatrixXd> inputs_;
    std::vector<Eigen::MatrixXd> preacts_;
    std::vector<Eigen::ArrayXXd> d1_, d2_, d3_;
};

}  // namespace starrad::nn
