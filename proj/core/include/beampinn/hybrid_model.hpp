#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace beampinn {

enum class FourierInit {
    kScaledByNPlusOne,  // std 0.1 / (n + 1)
    kScaledByN,         // std 0.1 / n
};

struct ModelConfig {
    int harmonics = 10;
    std::vector<int> layer_dims{2, 128, 128, 64, 32, 16, 8, 1};
    double length = 10.0;
    double wave_speed = 1.0;
    FourierInit fourier_init = FourierInit::kScaledByNPlusOne;
    double xavier_gain = 0.01;
    double initial_lambda = 1e-8;

    /// Throws std::invalid_argument on inconsistent settings.
    void validate() const;
};

struct ParamCount {
    std::size_t net = 0;
    std::size_t fourier = 0;
    /// net + fourier. The learnable scale lambda is not part of this figure.
    std::size_t total_reported = 0;
    /// Everything the optimizer touches: total_reported + 1.
    std::size_t trainable = 0;
};

/// Read-only view of one dense layer inside the flat parameter vector.
struct LayerView {
    int in = 0;
    int out = 0;
    std::size_t weight_offset = 0;  // row-major out x in
    std::size_t bias_offset = 0;
};

/// Borrowed view of the truncated modal series sum_n [a_n cos(w_n t) + b_n sin(w_n t)] sin(k_n x).
struct FourierHead {
    std::span<const double> a;
    std::span<const double> b;
    double length = 1.0;
    double wave_speed = 1.0;

    int harmonics() const noexcept { return static_cast<int>(a.size()); }
    /// k_n = n pi / L, n starting at 1.
    double wave_number(int n) const noexcept;
    /// omega_n = k_n^2 c.
    double angular_frequency(int n) const noexcept;
    /// sin(k_n x), exactly zero at x = 0 and x = L.
    double mode_shape(int n, double x) const noexcept;
    double value(double t, double x) const noexcept;
};

/// Dense tanh network R^2 -> R with identity output.
struct MlpShape {
    std::vector<int> dims;
    std::vector<LayerView> layers;
    std::size_t param_count = 0;

    static MlpShape build(const std::vector<int>& dims, std::size_t base_offset);
    std::size_t weight_count() const noexcept;
};

/// w(t, x) = Fourier(t, x) + lambda * MLP(t, x) * sin(pi x / L).
///
/// All learnable quantities live in one flat vector laid out as
/// [a_1..a_N, b_1..b_N, lambda, layer_1 W, layer_1 b, ...].
class HybridModel {
public:
    HybridModel(ModelConfig config, std::uint64_t seed);

    const ModelConfig& config() const noexcept { return config_; }
    std::uint64_t seed() const noexcept { return seed_; }
    int harmonics() const noexcept { return config_.harmonics; }
    double length() const noexcept { return config_.length; }
    double wave_speed() const noexcept { return config_.wave_speed; }

    std::span<const double> params() const noexcept { return params_; }
    std::span<double> params() noexcept { return params_; }
    std::size_t size() const noexcept { return params_.size(); }

    std::span<double> cos_coeffs() noexcept { return {params_.data(), static_cast<std::size_t>(harmonics())}; }
    std::span<double> sin_coeffs() noexcept {
        return {params_.data() + harmonics(), static_cast<std::size_t>(harmonics())};
    }
    std::span<const double> cos_coeffs() const noexcept {
        return {params_.data(), static_cast<std::size_t>(harmonics())};
    }
    std::span<const double> sin_coeffs() const noexcept {
        return {params_.data() + harmonics(), static_cast<std::size_t>(harmonics())};
    }
    double lambda() const noexcept { return params_[lambda_index()]; }
    void set_lambda(double v) noexcept { params_[lambda_index()] = v; }

    std::size_t lambda_index() const noexcept { return 2 * static_cast<std::size_t>(harmonics()); }
    std::size_t net_offset() const noexcept { return lambda_index() + 1; }
    std::span<const double> net_params() const noexcept {
        return std::span<const double>(params_).subspan(net_offset());
    }
    std::span<double> net_params() noexcept { return std::span<double>(params_).subspan(net_offset()); }

    const MlpShape& mlp() const noexcept { return mlp_; }
    FourierHead fourier() const noexcept;

    /// sin(pi x / L), the boundary modulation of the neural correction.
    double modulation(double x) const noexcept;
    /// Taylor coefficients of h -> sin(pi (x + h) / L) up to order 4.
    std::array<double, 5> modulation_series(double x) const noexcept;

    /// Plain forward pass of the MLP (no derivatives).
    double net_value(double t, double x) const;

    /// Zeroes every parameter (Fourier, lambda and network).
    void clear();

private:
    ModelConfig config_;
    std::uint64_t seed_;
    MlpShape mlp_;
    std::vector<double> params_;
};

/// Fourier coefficients from N(0, 0.1/(n+1)) (or 0.1/n), Xavier-uniform
/// weights scaled by the configured gain, zero biases, lambda = 1e-8.
/// Fully determined by the seed.
HybridModel init_model(const ModelConfig& config, std::uint64_t seed);

ParamCount param_count(const HybridModel& model);
ParamCount param_count(const ModelConfig& config);

struct DerivativeBundle {
    double w = 0.0;
    double w_t = 0.0;
    double w_tt = 0.0;
    double w_xxxx = 0.0;
};

struct DerivativeRequest {
    bool w_t = false;
    bool w_tt = true;
    bool w_xxxx = true;
};

double eval_model(const HybridModel& model, double t, double x);
DerivativeBundle eval_model_jets(const HybridModel& model, double t, double x, DerivativeRequest need = {});

}  // namespace beampinn
