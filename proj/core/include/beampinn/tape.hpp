#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "beampinn/jet.hpp"

namespace beampinn {

using NodeId = std::int32_t;
using ParamId = std::int32_t;

enum class OpKind : std::uint8_t {
    kConstant,
    kInput,
    kParameter,
    kAdd,
    kSub,
    kMul,
    kScale,
    kTanh,
    kSin,
    kCos,
};

struct TapeNode {
    OpKind kind = OpKind::kConstant;
    NodeId lhs = -1;
    NodeId rhs = -1;
    ParamId param = -1;
    double scalar = 0.0;  // factor for kScale
    Jet value;
};

/// One term of a scalar objective: weight * value(node)[coeff].
struct ObjectiveTerm {
    NodeId node = -1;
    int coeff = 0;
    double weight = 1.0;
};

/// Append-only recording of a jet-valued computation.
///
/// Every node stores its forward jet. The reverse pass propagates jet-shaped
/// adjoints: for a truncated product the adjoint is the truncated correlation,
/// and for a unary f the adjoint is the correlation with the series of f'.
/// That makes gradients of any Taylor coefficient exact, including the
/// fourth-order spatial one.
class Tape {
public:
    explicit Tape(int order);

    int order() const noexcept { return order_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    const TapeNode& node(NodeId id) const;
    const Jet& value(NodeId id) const { return node(id).value; }

    NodeId constant(double v);
    /// An input leaf that is not differentiated against (e.g. a seeded coordinate).
    NodeId input(const Jet& v);
    NodeId parameter(ParamId id, double v);

    NodeId add(NodeId a, NodeId b);
    NodeId sub(NodeId a, NodeId b);
    NodeId mul(NodeId a, NodeId b);
    NodeId scale(NodeId a, double s);
    NodeId tanh(NodeId a);
    NodeId sin(NodeId a);
    NodeId cos(NodeId a);

    /// Recomputes every node in order, substituting parameter leaves with
    /// values[param id]. An empty span keeps the recorded leaf values.
    void forward(std::span<const double> values = {});

    /// Accumulates d(objective)/d(parameter) into grad[param id].
    void backward(std::span<const ObjectiveTerm> objective, std::span<double> grad) const;
    /// Same, returned as a sparse map over the parameter leaves that were touched.
    std::map<ParamId, double> gradient(std::span<const ObjectiveTerm> objective) const;

    ParamId max_param_id() const noexcept { return max_param_; }

private:
    NodeId push(TapeNode n);
    void check(NodeId id) const;
    Jet evaluate(const TapeNode& n) const;
    std::vector<Jet> adjoints(std::span<const ObjectiveTerm> objective) const;

    int order_;
    ParamId max_param_ = -1;
    std::vector<TapeNode> nodes_;
};

}  // namespace beampinn
