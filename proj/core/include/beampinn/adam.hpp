#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace beampinn {

struct AdamOptions {
    double lr = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Bias-corrected Adam over one flat parameter vector.
class Adam {
public:
    Adam(std::size_t size, AdamOptions options = {});

    /// Throws DivergenceError if the update would produce a non-finite parameter.
    void step(std::span<double> params, std::span<const double> grads);

    double lr() const noexcept { return options_.lr; }
    void set_lr(double lr) noexcept { options_.lr = lr; }
    std::int64_t steps() const noexcept { return steps_; }
    std::span<const double> first_moment() const noexcept { return m_; }
    std::span<const double> second_moment() const noexcept { return v_; }

private:
    AdamOptions options_;
    std::vector<double> m_;
    std::vector<double> v_;
    std::int64_t steps_ = 0;
};

/// Rescales grads in place so their global L2 norm is at most max_norm.
/// Returns the norm before clipping. Throws DivergenceError on non-finite
/// entries and std::invalid_argument if max_norm <= 0.
double clip_global_norm(std::span<double> grads, double max_norm);

double l2_norm(std::span<const double> v);

struct PlateauOptions {
    double factor = 0.5;
    int patience = 100;
    double min_lr = 1e-5;
    /// Relative improvement over the best loss that counts as progress.
    double threshold = 1e-4;
};

/// Reduce-on-plateau learning-rate schedule.
class PlateauScheduler {
public:
    explicit PlateauScheduler(PlateauOptions options = {}) : options_(options) {}

    /// Feeds one loss observation and returns the (possibly reduced) rate.
    double step(double loss, double lr);

    int bad_steps() const noexcept { return bad_steps_; }
    double best() const noexcept { return best_; }

private:
    PlateauOptions options_;
    double best_ = 0.0;
    bool has_best_ = false;
    int bad_steps_ = 0;
};

}  // namespace beampinn
