#include "beampinn/tape.hpp"

#include <stdexcept>
#include <string>

namespace beampinn {

namespace {

// adj_a[j] += sum_{k>=j} adj_y[k] * d[k-j]
void correlate_into(Jet& adj_a, const Jet& adj_y, const Jet& d) {
    const int n = adj_y.order();
    for (int j = 0; j <= n; ++j) {
        double acc = 0.0;
        for (int k = j; k <= n; ++k) acc += adj_y[k] * d[k - j];
        adj_a[j] += acc;
    }
}

}  // namespace

Tape::Tape(int order) : order_(order) {
    if (!Jet::supported_order(order)) {
        throw std::invalid_argument("tape order " + std::to_string(order) + " is not one of {0, 1, 2, 4}");
    }
}

const TapeNode& Tape::node(NodeId id) const {
    check(id);
    return nodes_[static_cast<std::size_t>(id)];
}

void Tape::check(NodeId id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size()) {
        throw std::out_of_range("dangling tape node id " + std::to_string(id));
    }
}

NodeId Tape::push(TapeNode n) {
    nodes_.push_back(std::move(n));
    return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId Tape::constant(double v) {
    TapeNode n;
    n.kind = OpKind::kConstant;
    n.value = Jet::constant(v, order_);
    return push(std::move(n));
}

NodeId Tape::input(const Jet& v) {
    if (v.order() != order_) {
        throw std::invalid_argument("input jet order does not match tape order");
    }
    TapeNode n;
    n.kind = OpKind::kInput;
    n.value = v;
    return push(std::move(n));
}

NodeId Tape::parameter(ParamId id, double v) {
    if (id < 0) throw std::invalid_argument("negative parameter id");
    TapeNode n;
    n.kind = OpKind::kParameter;
    n.param = id;
    n.value = Jet::constant(v, order_);
    if (id > max_param_) max_param_ = id;
    return push(std::move(n));
}

Jet Tape::evaluate(const TapeNode& n) const {
    const auto& at = [this](NodeId i) -> const Jet& { return nodes_[static_cast<std::size_t>(i)].value; };
    switch (n.kind) {
        case OpKind::kConstant:
        case OpKind::kInput:
        case OpKind::kParameter: return n.value;
        case OpKind::kAdd: return at(n.lhs) + at(n.rhs);
        case OpKind::kSub: return at(n.lhs) - at(n.rhs);
        case OpKind::kMul: return at(n.lhs) * at(n.rhs);
        case OpKind::kScale: return at(n.lhs) * n.scalar;
        case OpKind::kTanh: return beampinn::tanh(at(n.lhs));
        case OpKind::kSin: return beampinn::sin(at(n.lhs));
        case OpKind::kCos: return beampinn::cos(at(n.lhs));
    }
    throw std::logic_error("unknown tape op");
}

NodeId Tape::add(NodeId a, NodeId b) {
    check(a);
    check(b);
    TapeNode n;
    n.kind = OpKind::kAdd;
    n.lhs = a;
    n.rhs = b;
    n.value = evaluate(n);
    return push(std::move(n));
}

NodeId Tape::sub(NodeId a, NodeId b) {
    check(a);
    check(b);
    TapeNode n;
    n.kind = OpKind::kSub;
    n.lhs = a;
    n.rhs = b;
    n.value = evaluate(n);
    return push(std::move(n));
}

NodeId Tape::mul(NodeId a, NodeId b) {
    check(a);
    check(b);
    TapeNode n;
    n.kind = OpKind::kMul;
    n.lhs = a;
    n.rhs = b;
    n.value = evaluate(n);
    return push(std::move(n));
}

NodeId Tape::scale(NodeId a, double s) {
    check(a);
    TapeNode n;
    n.kind = OpKind::kScale;
    n.lhs = a;
    n.scalar = s;
    n.value = evaluate(n);
    return push(std::move(n));
}

NodeId Tape::tanh(NodeId a) {
    check(a);
    TapeNode n;
    n.kind = OpKind::kTanh;
    n.lhs = a;
    n.value = evaluate(n);
    return push(std::move(n));
}

NodeId Tape::sin(NodeId a) {
    check(a);
    TapeNode n;
    n.kind = OpKind::kSin;
    n.lhs = a;
    n.value = evaluate(n);
    return push(std::move(n));
}

NodeId Tape::cos(NodeId a) {
    check(a);
    TapeNode n;
    n.kind = OpKind::kCos;
    n.lhs = a;
    n.value = evaluate(n);
    return push(std::move(n));
}

void Tape::forward(std::span<const double> values) {
    for (auto& n : nodes_) {
        if (n.kind == OpKind::kParameter) {
            if (!values.empty()) {
                if (static_cast<std::size_t>(n.param) >= values.size()) {
                    throw std::out_of_range("parameter id " + std::to_string(n.param) + " outside value span");
                }
                n.value = Jet::constant(values[static_cast<std::size_t>(n.param)], order_);
            }
            continue;
        }
        n.value = evaluate(n);
    }
}

std::vector<Jet> Tape::adjoints(std::span<const ObjectiveTerm> objective) const {
    std::vector<Jet> adj(nodes_.size(), Jet::constant(0.0, order_));
    for (const auto& term : objective) {
        check(term.node);
        if (term.coeff < 0 || term.coeff > order_) {
            throw std::out_of_range("objective coefficient index " + std::to_string(term.coeff) +
                                    " out of range for order " + std::to_string(order_));
        }
        adj[static_cast<std::size_t>(term.node)][term.coeff] += term.weight;
    }

    for (std::size_t i = nodes_.size(); i-- > 0;) {
        const TapeNode& n = nodes_[i];
        const Jet& ybar = adj[i];
        switch (n.kind) {
            case OpKind::kConstant:
            case OpKind::kInput:
            case OpKind::kParameter: break;
            case OpKind::kAdd:
                adj[static_cast<std::size_t>(n.lhs)] += ybar;
                adj[static_cast<std::size_t>(n.rhs)] += ybar;
                break;
            case OpKind::kSub:
                adj[static_cast<std::size_t>(n.lhs)] += ybar;
                adj[static_cast<std::size_t>(n.rhs)] -= ybar;
                break;
            case OpKind::kMul: {
                const Jet& a = nodes_[static_cast<std::size_t>(n.lhs)].value;
                const Jet& b = nodes_[static_cast<std::size_t>(n.rhs)].value;
                // Copy first: lhs and rhs may be the same node.
                Jet da = Jet::constant(0.0, order_);
                Jet db = Jet::constant(0.0, order_);
                correlate_into(da, ybar, b);
                correlate_into(db, ybar, a);
                adj[static_cast<std::size_t>(n.lhs)] += da;
                adj[static_cast<std::size_t>(n.rhs)] += db;
                break;
            }
            case OpKind::kScale: adj[static_cast<std::size_t>(n.lhs)] += ybar * n.scalar; break;
            case OpKind::kTanh: {
                const Jet slope = tanh_series(nodes_[static_cast<std::size_t>(n.lhs)].value).slope;
                correlate_into(adj[static_cast<std::size_t>(n.lhs)], ybar, slope);
                break;
            }
            case OpKind::kSin: {
                const Jet slope = sin_cos_series(nodes_[static_cast<std::size_t>(n.lhs)].value).cos;
                correlate_into(adj[static_cast<std::size_t>(n.lhs)], ybar, slope);
                break;
            }
            case OpKind::kCos: {
                const Jet slope = -sin_cos_series(nodes_[static_cast<std::size_t>(n.lhs)].value).sin;
                correlate_into(adj[static_cast<std::size_t>(n.lhs)], ybar, slope);
                break;
            }
        }
    }
    return adj;
}

void Tape::backward(std::span<const ObjectiveTerm> objective, std::span<double> grad) const {
    const auto adj = adjoints(objective);
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const TapeNode& n = nodes_[i];
        if (n.kind != OpKind::kParameter) continue;
        if (static_cast<std::size_t>(n.param) >= grad.size()) {
            throw std::out_of_range("gradient span too small for parameter id " + std::to_string(n.param));
        }
        // Parameters are constants along the jet direction, so only the
        // zeroth adjoint coefficient flows into them.
        grad[static_cast<std::size_t>(n.param)] += adj[i][0];
    }
}

std::map<ParamId, double> Tape::gradient(std::span<const ObjectiveTerm> objective) const {
    const auto adj = adjoints(objective);
    std::map<ParamId, double> out;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const TapeNode& n = nodes_[i];
        if (n.kind == OpKind::kParameter) out[n.param] += adj[i][0];
    }
    return out;
}

}  // namespace beampinn
