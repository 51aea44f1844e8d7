#include "beampinn/adam.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "beampinn/error.hpp"

namespace beampinn {

Adam::Adam(std::size_t size, AdamOptions options) : options_(options), m_(size, 0.0), v_(size, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grads) {
    if (params.size() != m_.size() || grads.size() != m_.size()) {
        throw std::invalid_argument("Adam: parameter/gradient size mismatch");
    }
    ++steps_;
    const double b1 = options_.beta1;
    const double b2 = options_.beta2;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        m_[i] = b1 * m_[i] + (1.0 - b1) * grads[i];
        v_[i] = b2 * v_[i] + (1.0 - b2) * grads[i] * grads[i];
        const double m_hat = m_[i] / bc1;
        const double v_hat = v_[i] / bc2;
        const double next = params[i] - options_.lr * m_hat / (std::sqrt(v_hat) + options_.eps);
        if (!std::isfinite(next)) throw DivergenceError("Adam produced a non-finite parameter");
        params[i] = next;
    }
}

double l2_norm(std::span<const double> v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

double clip_global_norm(std::span<double> grads, double max_norm) {
    if (!(max_norm > 0.0)) throw std::invalid_argument("clip norm must be > 0");
    const double norm = l2_norm(grads);
    if (!std::isfinite(norm)) throw DivergenceError("gradient norm is not finite");
    if (norm > max_norm) {
        const double s = max_norm / norm;
        for (double& g : grads) g *= s;
    }
    return norm;
}

double PlateauScheduler::step(double loss, double lr) {
    if (!has_best_ || loss < best_ * (1.0 - options_.threshold)) {
        best_ = loss;
        has_best_ = true;
        bad_steps_ = 0;
        return lr;
    }
    if (++bad_steps_ >= options_.patience) {
        bad_steps_ = 0;
        return std::max(lr * options_.factor, options_.min_lr);
    }
    return lr;
}

}  // namespace beampinn
