#include "starrad/tape.hpp"

#include <cmath>
#include <string>

#include "starrad/errors.hpp"

namespace starrad::ad {

namespace {

Tape* pick(const Var& a, const Var& b) { return a.tape() != nullptr ? a.tape() : b.tape(); }

Var binary(double value, const Var& a, double da, const Var& b, double db) {
    Tape* t = pick(a, b);
    if (t == nullptr) return Var::constant(value);
    return t->record(value, a, da, b, db);
}

Var unary(double value, const Var& a, double da) {
    if (a.tape() == nullptr) return Var::constant(value);
    return a.tape()->record(value, a, da);
}

}  // namespace

Var operator+(const Var& a, const Var& b) { return binary(a.value() + b.value(), a, 1.0, b, 1.0); }
Var operator-(const Var& a, const Var& b) { return binary(a.value() - b.value(), a, 1.0, b, -1.0); }
Var operator*(const Var& a, const Var& b) {
    return binary(a.value() * b.value(), a, b.value(), b, a.value());
}
Var operator/(const Var& a, const Var& b) {
    const double q = a.value() / b.value();
    return binary(q, a, 1.0 / b.value(), b, -q / b.value());
}
Var operator-(const Var& a) { return unary(-a.value(), a, -1.0); }
Var operator+(const Var& a, double b) { return unary(a.value() + b, a, 1.0); }
Var operator+(double a, const Var& b) { return unary(a + b.value(), b, 1.0); }
Var operator-(const Var& a, double b) { return unary(a.value() - b, a, 1.0); }
Var operator-(double a, const Var& b) { return unary(a - b.value(), b, -1.0); }
Var operator*(const Var& a, double b) { return unary(a.value() * b, a, b); }
Var operator*(double a, const Var& b) { return unary(a * b.value(), b, a); }
Var operator/(const Var& a, double b) { return unary(a.value() / b, a, 1.0 / b); }

Var square(const Var& a) { return unary(a.value() * a.value(), a, 2.0 * a.value()); }

Var sqrt(const Var& a) {
    const double r = std::sqrt(a.value());
    return unary(r, a, 0.5 / r);
}

Var exp(const Var& a) {
    const double e = std::exp(a.value());
    return unary(e, a, e);
}

Var tanh(const Var& a) {
    const double t = std::tanh(a.value());
    return unary(t, a, 1.0 - t * t);
}

Var Tape::variable(double value) {
    nodes_.push_back(Node{});
    return Var(this, static_cast<std::int32_t>(nodes_.size() - 1), value);
}

Var Tape::record(double value, const Var& a, double da, const Var& b, double db) {
    Node node;
    if (a.tape() == this) {
        node.a = a.index();
        node.da = da;
    }
    if (b.tape() == this) {
        node.b = b.index();
        node.db = db;
    }
    nodes_.push_back(node);
    return Var(this, static_cast<std::int32_t>(nodes_.size() - 1), value);
}

Var Tape::record(double value, const Var& a, double da) {
    return record(value, a, da, Var::constant(0.0), 0.0);
}

std::vector<double> Tape::adjoints(const Var& output) const {
    std::vector<double> bar(nodes_.size(), 0.0);
    if (output.tape() != this) return bar;
    bar[static_cast<std::size_t>(output.index())] = 1.0;
    for (std::size_t i = static_cast<std::size_t>(output.index()) + 1; i-- > 0;) {
        const double g = bar[i];
        if (g == 0.0) continue;
        const Node& node = nodes_[i];
        if (node.a >= 0) bar[static_cast<std::size_t>(node.a)] += g * node.da;
        if (node.b >= 0) bar[static_cast<std::size_t>(node.b)] += g * node.db;
    }
    return bar;
}

TapedJets::TapedJets(Tape& tape, const nn::JetBatch& jets, bool derivatives)
    : tape_(&tape),
      base_(static_cast<std::int32_t>(tape.size())),
      count_(jets.size()),
      dim_(derivatives ? jets.input_dim() : 0),
      input_dim_(jets.input_dim()) {
    const int channels = 1 + 2 * dim_;
    values_.resize(static_cast<std::size_t>(channels * count_));
    for (Eigen::Index p = 0; p < count_; ++p) {
        values_[static_cast<std::size_t>(p)] = jets.value(p);
        for (int i = 0; i < dim_; ++i) {
            values_[static_cast<std::size_t>((1 + i) * count_ + p)] = jets.grad(i, p);
            values_[static_cast<std::size_t>((1 + dim_ + i) * count_ + p)] = jets.diag_hess(i, p);
        }
    }
    tape.reserve(tape.size() + values_.size() * 4);
    for (double v : values_) tape.variable(v);
}

Var TapedJets::at(int channel, Eigen::Index point) const {
    const auto offset = static_cast<std::int32_t>(channel * count_ + point);
    return Var(tape_, base_ + offset, values_[static_cast<std::size_t>(offset)]);
}

Var TapedJets::grad(Eigen::Index point, int axis) const {
    if (axis < 0 || axis >= dim_) throw ConfigError("no first-derivative channel for this batch");
    return at(1 + axis, point);
}

Var TapedJets::diag_hess(Eigen::Index point, int axis) const {
    if (axis < 0 || axis >= dim_) throw ConfigError("no second-derivative channel for this batch");
    return at(1 + dim_ + axis, point);
}

nn::JetBatch TapedJets::gather(const std::vector<double>& adjoints) const {
    nn::JetBatch out(input_dim_, count_);
    for (Eigen::Index p = 0; p < count_; ++p) {
        out.value(p) = adjoints[static_cast<std::size_t>(base_ + p)];
        for (int i = 0; i < dim_; ++i) {
            out.grad(i, p) = adjoints[static_cast<std::size_t>(base_ + (1 + i) * count_ + p)];
            out.diag_hess(i, p) =
                adjoints[static_cast<std::size_t>(base_ + (1 + dim_ + i) * count_ + p)];
        }
    }
    return out;
}

namespace {

void require_finite(const nn::JetBatch& jets, const nn::PointSet& points) {
    for (Eigen::Index p = 0; p < jets.size(); ++p) {
        if (!std::isfinite(jets.value(p)) || !jets.grad.col(p).allFinite() ||
            !jets.diag_hess.col(p).allFinite()) {
            throw EvaluationError("non-finite network jet",
                                  std::vector<double>(points.col(p).data(),
                                                      points.col(p).data() + points.rows()));
        }
    }
}

}  // namespace

LossGradient loss_gradient(const nn::ParameterVector& params, const nn::NetworkSpec& spec,
                           std::span<const BatchRequest> batches, const MultiJetLoss& loss) {
    std::vector<nn::JetTrace> traces;
    traces.reserve(batches.size());
    for (const auto& b : batches) {
        traces.emplace_back(params, spec, b.points, b.derivatives);
        require_finite(traces.back().jets(), b.points);
    }

    Tape tape;
    std::vector<TapedJets> taped;
    taped.reserve(batches.size());
    for (std::size_t i = 0; i < batches.size(); ++i) {
        taped.emplace_back(tape, traces[i].jets(), batches[i].derivatives);
    }
    const Var total = loss(taped);

    LossGradient out;
    out.loss = total.value();
    out.gradient = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(params.size()));
    if (!std::isfinite(out.loss)) throw EvaluationError("non-finite loss", {});
    if (total.tape() == nullptr) return out;

    const std::vector<double> bar = tape.adjoints(total);
    for (std::size_t i = 0; i < batches.size(); ++i) {
        out.gradient += traces[i].backward(taped[i].gather(bar));
    }
    if (!out.gradient.allFinite()) throw EvaluationError("non-finite loss gradient", {});
    return out;
}

LossGradient loss_gradient(const nn::ParameterVector& params, const nn::NetworkSpec& spec,
                           const nn::PointSet& points, const JetLoss& loss) {
    const BatchRequest request{points, true};
    return loss_gradient(params, spec, std::span<const BatchRequest>(&request, 1),
                         [&loss](std::span<const TapedJets> jets) { return loss(jets.front()); });
}

}  // namespace starrad::ad
