#include "beampinn/model_tape.hpp"

#include <numbers>
#include <vector>

namespace beampinn {

NodeId record_model(Tape& tape, const HybridModel& model, double t, double x, Direction direction) {
    const int order = tape.order();
    const bool along_t = direction == Direction::kTime && order > 0;
    const bool along_x = direction == Direction::kSpace && order > 0;
    const NodeId tin = tape.input(along_t ? Jet::seed(t, order) : Jet::constant(t, order));
    const NodeId xin = tape.input(along_x ? Jet::seed(x, order) : Jet::constant(x, order));
    const auto params = model.params();
    auto leaf = [&](std::size_t id) { return tape.parameter(static_cast<ParamId>(id), params[id]); };

    const FourierHead f = model.fourier();
    const int n_harm = f.harmonics();
    NodeId w = -1;
    for (int n = 1; n <= n_harm; ++n) {
        const NodeId phase = tape.scale(tin, f.angular_frequency(n));
        const NodeId a = leaf(static_cast<std::size_t>(n - 1));
        const NodeId b = leaf(static_cast<std::size_t>(n_harm + n - 1));
        const NodeId temporal = tape.add(tape.mul(a, tape.cos(phase)), tape.mul(b, tape.sin(phase)));
        const NodeId shape = tape.sin(tape.scale(xin, f.wave_number(n)));
        const NodeId term = tape.mul(temporal, shape);
        w = (w < 0) ? term : tape.add(w, term);
    }

    const MlpShape& mlp = model.mlp();
    const std::size_t base = model.net_offset();
    std::vector<NodeId> act{tin, xin};
    std::vector<NodeId> next;
    for (std::size_t l = 0; l < mlp.layers.size(); ++l) {
        const LayerView& v = mlp.layers[l];
        next.clear();
        for (int o = 0; o < v.out; ++o) {
            NodeId z = leaf(base + v.bias_offset + static_cast<std::size_t>(o));
            const std::size_t row = base + v.weight_offset + static_cast<std::size_t>(o) * v.in;
            for (int i = 0; i < v.in; ++i) {
                z = tape.add(z, tape.mul(leaf(row + static_cast<std::size_t>(i)), act[static_cast<std::size_t>(i)]));
            }
            next.push_back(l + 1 < mlp.layers.size() ? tape.tanh(z) : z);
        }
        act.swap(next);
    }
    const NodeId modulation = tape.sin(tape.scale(xin, std::numbers::pi / model.length()));
    const NodeId neural = tape.mul(tape.mul(leaf(model.lambda_index()), act[0]), modulation);
    return w < 0 ? neural : tape.add(w, neural);
}

}  // namespace beampinn
