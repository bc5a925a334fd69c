#pragma once

// Scalar reverse-mode differentiation on a Wengert list, used to assemble
// losses from network jets. Every Var records at most two parents and the
// local partial derivatives with respect to them.

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "starrad/network.hpp"

namespace starrad::ad {

class Tape;

class Var {
public:
    Var() = default;

    double value() const noexcept { return value_; }
    std::int32_t index() const noexcept { return index_; }
    Tape* tape() const noexcept { return tape_; }
    bool is_constant() const noexcept { return tape_ == nullptr; }

    friend Var operator+(const Var& a, const Var& b);
    friend Var operator-(const Var& a, const Var& b);
    friend Var operator*(const Var& a, const Var& b);
    friend Var operator/(const Var& a, const Var& b);
    friend Var operator-(const Var& a);
    friend Var operator+(const Var& a, double b);
    friend Var operator+(double a, const Var& b);
    friend Var operator-(const Var& a, double b);
    friend Var operator-(double a, const Var& b);
    friend Var operator*(const Var& a, double b);
    friend Var operator*(double a, const Var& b);
    friend Var operator/(const Var& a, double b);

    Var& operator+=(const Var& b) { return *this = *this + b; }
    Var& operator-=(const Var& b) { return *this = *this - b; }
    Var& operator*=(const Var& b) { return *this = *this * b; }

    // A constant that lives on no tape.
    static Var constant(double value) { return Var(nullptr, -1, value); }

private:
    friend class Tape;
    friend class TapedJets;
    Var(Tape* tape, std::int32_t index, double value) : tape_(tape), index_(index), value_(value) {}

    Tape* tape_ = nullptr;
    std::int32_t index_ = -1;
    double value_ = 0.0;
};

Var square(const Var& a);
Var sqrt(const Var& a);
Var exp(const Var& a);
Var tanh(const Var& a);

class Tape {
public:
    Var variable(double value);
    std::size_t size() const noexcept { return nodes_.size(); }
    void reserve(std::size_t n) { nodes_.reserve(n); }

    /// d output / d node for every node on the tape.
    std::vector<double> adjoints(const Var& output) const;

    // Internal: record a node with up to two parents.
    Var record(double value, const Var& a, double da, const Var& b, double db);
    Var record(double value, const Var& a, double da);

private:
    struct Node {
        std::int32_t a = -1;
        std::int32_t b = -1;
        double da = 0.0;
        double db = 0.0;
    };
    std::vector<Node> nodes_;
};

/// Jets of a point batch registered as tape leaves. A value-only batch
/// registers just u and refuses grad()/diag_hess().
class TapedJets {
public:
    TapedJets(Tape& tape, const nn::JetBatch& jets, bool derivatives = true);

    bool has_derivatives() const noexcept { return dim_ > 0; }

    Eigen::Index size() const noexcept { return count_; }
    int input_dim() const noexcept { return input_dim_; }

    Var value(Eigen::Index point) const { return at(0, point); }
    Var grad(Eigen::Index point, int axis) const;
    Var diag_hess(Eigen::Index point, int axis) const;

    /// Collect leaf adjoints back into jet layout.
    nn::JetBatch gather(const std::vector<double>& adjoints) const;

private:
    Var at(int channel, Eigen::Index point) const;

    Tape* tape_;
    std::int32_t base_;
    Eigen::Index count_;
    int dim_;         // derivative channels per axis; 0 for value-only batches
    int input_dim_;
    std::vector<double> values_;
};

/// A scalar loss assembled from the jets of one point batch.
using JetLoss = std::function<Var(const TapedJets&)>;

/// A scalar loss assembled from several batches, in request order.
using MultiJetLoss = std::function<Var(std::span<const TapedJets>)>;

struct BatchRequest {
    nn::PointSet points;
    bool derivatives = true;  // false: only u is needed at these points
};

struct LossGradient {
    double loss = 0.0;
    Eigen::VectorXd gradient;
};

/// Exact gradient of loss(jets(params)) with respect to all parameters: the
/// loss is differentiated on the tape, then the jet adjoint is pulled back
/// through the network. Throws EvaluationError at the first point whose jet
/// is not finite, or if the loss itself is not finite.
LossGradient loss_gradient(const nn::ParameterVector& params, const nn::NetworkSpec& spec,
                           const nn::PointSet& points, const JetLoss& loss);

LossGradient loss_gradient(const nn::ParameterVector& params, const nn::NetworkSpec& spec,
                           std::span<const BatchRequest> batches, const MultiJetLoss& loss);

}  // namespace starrad::ad
