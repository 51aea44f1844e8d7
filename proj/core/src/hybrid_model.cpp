#include "beampinn/hybrid_model.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "beampinn/jet.hpp"
#include "beampinn/mlp_jets.hpp"

namespace beampinn {

void ModelConfig::validate() const {
    if (harmonics < 1) {
        throw std::invalid_argument("harmonics must be >= 1, got " + std::to_string(harmonics));
    }
    if (layer_dims.size() < 2) throw std::invalid_argument("layer_dims needs at least input and output");
    if (layer_dims.front() != 2) throw std::invalid_argument("first layer dimension must be 2 (t, x)");
    if (layer_dims.back() != 1) throw std::invalid_argument("last layer dimension must be 1");
    for (int d : layer_dims) {
        if (d < 1) throw std::invalid_argument("layer dimensions must be positive");
    }
    if (!(length > 0.0) || !std::isfinite(length)) throw std::invalid_argument("beam length must be > 0");
    if (!(wave_speed > 0.0) || !std::isfinite(wave_speed)) throw std::invalid_argument("wave speed must be > 0");
    if (!(xavier_gain >= 0.0)) throw std::invalid_argument("xavier gain must be >= 0");
}

double FourierHead::wave_number(int n) const noexcept { return n * std::numbers::pi / length; }

double FourierHead::angular_frequency(int n) const noexcept {
    const double k = wave_number(n);
    return k * k * wave_speed;
}

double FourierHead::mode_shape(int n, double x) const noexcept { return sin_pi(n * (x / length)); }

double FourierHead::value(double t, double x) const noexcept {
    double acc = 0.0;
    for (int n = 1; n <= harmonics(); ++n) {
        const double w = angular_frequency(n);
        const double tf = a[n - 1] * std::cos(w * t) + b[n - 1] * std::sin(w * t);
        acc += tf * mode_shape(n, x);
    }
    return acc;
}

MlpShape MlpShape::build(const std::vector<int>& dims, std::size_t base_offset) {
    MlpShape s;
    s.dims = dims;
    std::size_t off = base_offset;
    for (std::size_t l = 1; l < dims.size(); ++l) {
        LayerView v;
        v.in = dims[l - 1];
        v.out = dims[l];
        v.weight_offset = off;
        off += static_cast<std::size_t>(v.in) * v.out;
        v.bias_offset = off;
        off += static_cast<std::size_t>(v.out);
        s.layers.push_back(v);
    }
    s.param_count = off - base_offset;
    return s;
}

std::size_t MlpShape::weight_count() const noexcept {
    std::size_t n = 0;
    for (const auto& l : layers) n += static_cast<std::size_t>(l.in) * l.out;
    return n;
}

HybridModel::HybridModel(ModelConfig config, std::uint64_t seed) : config_(std::move(config)), seed_(seed) {
    config_.validate();
    mlp_ = MlpShape::build(config_.layer_dims, 0);
    params_.assign(2 * static_cast<std::size_t>(config_.harmonics) + 1 + mlp_.param_count, 0.0);
}

FourierHead HybridModel::fourier() const noexcept {
    return FourierHead{cos_coeffs(), sin_coeffs(), config_.length, config_.wave_speed};
}

double HybridModel::modulation(double x) const noexcept { return sin_pi(x / config_.length); }

std::array<double, 5> HybridModel::modulation_series(double x) const noexcept {
    const double kappa = std::numbers::pi / config_.length;
    const double s = sin_pi(x / config_.length);
    const double c = cos_pi(x / config_.length);
    const double k2 = kappa * kappa;
    return {s, kappa * c, -k2 * s / 2.0, -k2 * kappa * c / 6.0, k2 * k2 * s / 24.0};
}

double HybridModel::net_value(double t, double x) const {
    const auto net = net_params();
    std::vector<double> act{t, x};
    std::vector<double> next;
    for (std::size_t l = 0; l < mlp_.layers.size(); ++l) {
        const LayerView& v = mlp_.layers[l];
        next.assign(static_cast<std::size_t>(v.out), 0.0);
        for (int o = 0; o < v.out; ++o) {
            double z = net[v.bias_offset + static_cast<std::size_t>(o)];
            const std::size_t row = v.weight_offset + static_cast<std::size_t>(o) * v.in;
            for (int i = 0; i < v.in; ++i) z += net[row + static_cast<std::size_t>(i)] * act[static_cast<std::size_t>(i)];
            next[static_cast<std::size_t>(o)] = (l + 1 < mlp_.layers.size()) ? std::tanh(z) : z;
        }
        act.swap(next);
    }
    return act[0];
}

void HybridModel::clear() { std::fill(params_.begin(), params_.end(), 0.0); }

HybridModel init_model(const ModelConfig& config, std::uint64_t seed) {
    HybridModel model(config, seed);
    std::mt19937_64 rng(seed);

    auto a = model.cos_coeffs();
    auto b = model.sin_coeffs();
    for (int n = 1; n <= config.harmonics; ++n) {
        const double denom = config.fourier_init == FourierInit::kScaledByNPlusOne ? n + 1.0 : n;
        std::normal_distribution<double> dist(0.0, 0.1 / denom);
        a[static_cast<std::size_t>(n - 1)] = dist(rng);
        b[static_cast<std::size_t>(n - 1)] = dist(rng);
    }

    auto net = model.net_params();
    for (const LayerView& v : model.mlp().layers) {
        const double bound = config.xavier_gain * std::sqrt(6.0 / (v.in + v.out));
        std::uniform_real_distribution<double> dist(-bound, bound);
        const std::size_t count = static_cast<std::size_t>(v.in) * v.out;
        for (std::size_t i = 0; i < count; ++i) net[v.weight_offset + i] = dist(rng);
        for (int o = 0; o < v.out; ++o) net[v.bias_offset + static_cast<std::size_t>(o)] = 0.0;
    }

    model.set_lambda(config.initial_lambda);
    return model;
}

ParamCount param_count(const ModelConfig& config) {
    ParamCount c;
    c.net = MlpShape::build(config.layer_dims, 0).param_count;
    c.fourier = 2 * static_cast<std::size_t>(config.harmonics);
    c.total_reported = c.net + c.fourier;
    c.trainable = c.total_reported + 1;
    return c;
}

ParamCount param_count(const HybridModel& model) { return param_count(model.config()); }

double eval_model(const HybridModel& model, double t, double x) {
    const double fourier = model.fourier().value(t, x);
    const double s = model.modulation(x);
    if (s == 0.0) return fourier;
    return fourier + model.lambda() * model.net_value(t, x) * s;
}

DerivativeBundle eval_model_jets(const HybridModel& model, double t, double x, DerivativeRequest need) {
    const FourierHead f = model.fourier();
    DerivativeBundle out;
    for (int n = 1; n <= f.harmonics(); ++n) {
        const double w = f.angular_frequency(n);
        const double k = f.wave_number(n);
        const double shape = f.mode_shape(n, x);
        const double c = std::cos(w * t);
        const double s = std::sin(w * t);
        const double an = f.a[static_cast<std::size_t>(n - 1)];
        const double bn = f.b[static_cast<std::size_t>(n - 1)];
        const double tf = an * c + bn * s;
        out.w += tf * shape;
        if (need.w_t) out.w_t += w * (bn * c - an * s) * shape;
        if (need.w_tt) out.w_tt += -w * w * tf * shape;
        if (need.w_xxxx) out.w_xxxx += (k * k) * (k * k) * tf * shape;
    }

    const double lambda = model.lambda();
    const JetLayout layout{(need.w_tt ? 2 : (need.w_t ? 1 : 0)), need.w_xxxx ? 4 : 0};
    MlpJetBatch batch(model);
    const double tv[] = {t};
    const double xv[] = {x};
    batch.forward(tv, xv, layout);

    const double modulation = model.modulation(x);
    out.w += lambda * batch.output(0, 0) * modulation;
    if (need.w_t) out.w_t += lambda * modulation * batch.output(layout.t_block(1), 0);
    if (need.w_tt) out.w_tt += lambda * modulation * 2.0 * batch.output(layout.t_block(2), 0);
    if (need.w_xxxx) {
        // Product of the network x-jet with the modulation x-jet, 4th coefficient.
        const auto mod = model.modulation_series(x);
        double p4 = 0.0;
        for (int j = 0; j <= 4; ++j) p4 += batch.output(layout.x_block(j), 0) * mod[static_cast<std::size_t>(4 - j)];
        out.w_xxxx += lambda * 24.0 * p4;
    }
    return out;
}

}  // namespace beampinn
